#include "axb/haar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

#include "axb/common.hpp"
#include "axb/multiplier.hpp"

namespace axb {

long HaarPartition::index_of(double t) const {
    return static_cast<long>(std::floor((t - offset) / scale));
}

double HaarPartition::psi(long k, double t) const {
    const double lo = left(k);
    if (t < lo || t >= lo + scale) return 0.0;
    return (t < lo + 0.5 * scale ? 1.0 : -1.0) / scale;
}

HaarLikeFunction::HaarLikeFunction(HaarPartition part, std::map<long, double> coeffs)
    : part_(part), coeffs_(std::move(coeffs)) {
    if (!(part.scale > 0)) throw std::invalid_argument("HaarLikeFunction: scale must be positive");
}

double HaarLikeFunction::eval(double t) const {
    const long k = part_.index_of(t);
    const auto it = coeffs_.find(k);
    if (it == coeffs_.end()) return 0.0;
    return it->second * part_.psi(k, t);
}

double HaarLikeFunction::l1_norm() const {
    double s = 0.0;
    for (const auto& [k, a] : coeffs_) s += std::abs(a);
    return s;
}

std::vector<double> HaarLikeFunction::breakpoints() const {
    std::vector<double> out;
    for (const auto& [k, a] : coeffs_) {
        (void)a;
        const double lo = part_.left(k);
        out.push_back(lo);
        out.push_back(lo + 0.5 * part_.scale);
        out.push_back(lo + part_.scale);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Dyadic family
// ---------------------------------------------------------------------------

namespace {

double thirds_offset(int s) {
    // alternate 2/3 (s even) and 1/3 (s odd); keeps the family nested and the
    // origin at relative position 1/3 or 2/3 inside its interval
    const bool even = ((s % 2) + 2) % 2 == 0;
    return even ? 2.0 / 3.0 : 1.0 / 3.0;
}

}  // namespace

DyadicFamily::Interval DyadicFamily::interval(int m, long k) const {
    const int s = -m;  // |I| = 2^{-m} = 2^s
    const double len = std::ldexp(1.0, s);
    const double lo = (static_cast<double>(k) + thirds_offset(s)) * len;
    return {lo, lo + len};
}

double DyadicFamily::psi(int m, long k, double t) const {
    const auto iv = interval(m, k);
    if (t < iv.lo || t >= iv.hi) return 0.0;
    return (t < iv.mid() ? 1.0 : -1.0) / (iv.hi - iv.lo);
}

double DyadicFamily::kappa(int m, long k) const {
    return C * std::pow(2.0, epsilon * m) *
           std::pow(1.0 + std::ldexp(1.0, m) + std::abs(static_cast<double>(k)), -2.0 - epsilon);
}

double DyadicFamily::kappa_partial_sum(double delta, int N, int M) const {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("kappa_partial_sum: delta in (0,1)");
    const double p = delta * (2.0 + epsilon);
    if (p <= 1.0) throw std::invalid_argument("kappa_partial_sum: delta (2+eps) must exceed 1");
    double total = 0.0;
    const long K0 = 100000;
    for (int m = -M; m <= M; ++m) {
        const double len = std::ldexp(1.0, -m);
        const double logp = std::max(0.0, std::log(len));
        const double shell_c =
            std::pow(std::pow(1.0 + logp, N) * C * std::pow(2.0, epsilon * m), delta);
        const double X = 1.0 + std::ldexp(1.0, m);
        double ksum = std::pow(X, -p);
        for (long k = 1; k <= K0; ++k) ksum += 2.0 * std::pow(X + k, -p);
        ksum += 2.0 * std::pow(X + K0, 1.0 - p) / (p - 1.0);  // integral tail
        total += shell_c * ksum;
    }
    return total;
}

double haar_coefficient(const std::function<double(double)>& rho, double lo, double hi,
                        int nodes) {
    const double mid = 0.5 * (lo + hi);
    // panel width capped at 1/2 so wide intervals still resolve unit-scale
    // variation of rho
    const int panels = std::max(1, static_cast<int>(std::ceil((mid - lo) / 0.5)));
    return integrate(rho, lo, mid, panels, nodes) - integrate(rho, mid, hi, panels, nodes);
}

std::map<std::pair<int, long>, double> haar_coefficients(
    const std::function<double(double)>& rho, const DyadicFamily& family, int M, double window,
    int nodes) {
    std::map<std::pair<int, long>, double> out;
    for (int m = -M; m <= M; ++m) {
        const double len = std::ldexp(1.0, -m);
        const double theta = thirds_offset(-m);
        const long k_lo = static_cast<long>(std::floor(-window / len - theta)) - 1;
        const long k_hi = static_cast<long>(std::ceil(window / len - theta)) + 1;
        for (long k = k_lo; k <= k_hi; ++k) {
            const auto iv = family.interval(m, k);
            if (iv.hi < -window || iv.lo > window) continue;
            out[{m, k}] = haar_coefficient(rho, iv.lo, iv.hi, nodes);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weak quasi-norm machinery
// ---------------------------------------------------------------------------

double weak_ratio(const WeightedSamples& g, double norm1) {
    if (!(norm1 > 0)) throw std::invalid_argument("weak_ratio: norm1 must be positive");
    if (g.value.size() != g.measure.size())
        throw std::invalid_argument("weak_ratio: value/measure size mismatch");
    double vmax = 0.0;
    for (double v : g.value) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return 0.0;

    std::vector<std::pair<double, double>> sorted(g.value.size());
    for (std::size_t i = 0; i < g.value.size(); ++i)
        sorted[i] = {std::abs(g.value[i]), g.measure[i]};
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    const double top = vmax * (1.0 - 1e-9);
    const double bottom = vmax * 1e-6;
    double sup = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double alpha = bottom * std::pow(top / bottom, i / 59.0);
        double mu = 0.0;
        for (const auto& [v, m] : sorted) {
            if (v > alpha) mu += m;
            else break;
        }
        sup = std::max(sup, alpha * mu);
    }
    return sup / norm1;
}

KeySum::KeySum(const std::map<int, HaarLikeFunction>& levels, double beta) : levels_(levels) {
    if (!(beta > 0)) throw std::invalid_argument("KeySum: beta must be positive");
    std::set<double> cuts;
    for (const auto& [h, delta] : levels) {
        const double expected = beta * std::ldexp(1.0, h);
        if (std::abs(delta.partition().scale / expected - 1.0) > 1e-12)
            throw std::invalid_argument("KeySum: level scale mismatch with beta 2^h");
        heights_.push_back(h);
        total_l1_ += delta.l1_norm();
        for (double b : delta.breakpoints()) cuts.insert(b);
    }
    if (cuts.size() < 2) return;
    std::vector<double> sorted(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        Piece p;
        p.measure = sorted[i + 1] - sorted[i];
        const double mid = 0.5 * (sorted[i] + sorted[i + 1]);
        p.level_values.reserve(heights_.size());
        bool any = false;
        for (const auto& [h, delta] : levels) {
            const double v = delta.eval(mid);
            p.level_values.push_back(v);
            any = any || v != 0.0;
        }
        if (any) pieces_.push_back(std::move(p));
    }
}

double KeySum::eval(double t, long k) const {
    double acc = 0.0;
    for (const auto& [h, delta] : levels_) {
        if (h >= k + 1) acc += delta.eval(t) / (h - k);
    }
    return acc;
}

double KeySum::total_l1() const { return total_l1_; }

double KeySum::weak_sup(double norm1, int k_direct) const {
    if (pieces_.empty()) return 0.0;
    const int h_lo = *std::min_element(heights_.begin(), heights_.end());
    const int h_hi = *std::max_element(heights_.begin(), heights_.end());
    const long k_cut = h_lo - k_direct;

    WeightedSamples direct;
    for (const auto& p : pieces_) {
        for (long k = k_cut; k <= h_hi - 1; ++k) {
            double s = 0.0;
            for (std::size_t li = 0; li < heights_.size(); ++li) {
                if (heights_[li] >= k + 1) s += p.level_values[li] / (heights_[li] - k);
            }
            if (s != 0.0) {
                direct.value.push_back(s);
                direct.measure.push_back(p.measure);
            }
        }
    }

    double vmax = 0.0;
    for (double v : direct.value) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return 0.0;

    std::vector<std::pair<double, double>> sorted(direct.value.size());
    for (std::size_t i = 0; i < direct.value.size(); ++i)
        sorted[i] = {std::abs(direct.value[i]), direct.measure[i]};
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> prefix(sorted.size() + 1, 0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i].second;

    // far tail k < k_cut: S_p(k) ~ A_p / (c_p - k)
    struct Tail {
        double measure, amp, center;
    };
    std::vector<Tail> tails;
    for (const auto& p : pieces_) {
        double a = 0.0, ah = 0.0;
        for (std::size_t li = 0; li < heights_.size(); ++li) {
            a += p.level_values[li];
            ah += p.level_values[li] * heights_[li];
        }
        if (a != 0.0) tails.push_back({p.measure, std::abs(a), ah / a});
    }

    const double top = vmax * (1.0 - 1e-9);
    const double bottom = vmax * 1e-6;
    double sup = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double alpha = bottom * std::pow(top / bottom, i / 59.0);
        const auto it = std::upper_bound(
            sorted.begin(), sorted.end(), alpha,
            [](double a, const auto& pr) { return a >= pr.first; });
        double mu = prefix[it - sorted.begin()];
        for (const auto& t : tails) {
            const double reach = t.amp / alpha - (t.center - k_cut);
            if (reach > 0.0) mu += t.measure * std::floor(reach);
        }
        sup = std::max(sup, alpha * mu);
    }
    return sup / norm1;
}

// ---------------------------------------------------------------------------
// Discrete flow operator
// ---------------------------------------------------------------------------

WeightedSamples DiscreteTResult::samples() const {
    WeightedSamples out;
    double cell = 1.0;
    for (const auto& ax : x_axes) cell *= ax.spacing();
    for (const auto& s : slices) {
        for (double v : s) {
            out.value.push_back(v);
            out.measure.push_back(cell);
        }
    }
    return out;
}

DiscreteTResult discrete_T(int j, const SampledFunction& f, int k_min, int k_max) {
    const GridSpec& grid = f.grid();
    const int n = grid.n();
    if (n > 2) throw std::invalid_argument("discrete_T: n supported in 1..2");
    if (j < 1 || j > n) throw std::invalid_argument("discrete_T: j must be in 1..n");
    if (k_max < k_min) throw std::invalid_argument("discrete_T: empty k range");

    const int h_lo = static_cast<int>(std::ceil(grid.u.min)) - 1;
    const int h_hi = static_cast<int>(std::floor(grid.u.max));
    const double extent = grid.x[0].max - grid.x[0].min;
    if (std::ldexp(1.0, h_hi + 1) > extent / 2.0)
        throw std::invalid_argument("discrete_T: rescaled profile exceeds the grid (support overflow)");

    // padded spectral convolution machinery
    std::vector<int> N(n), P(n);
    long slice_nodes = 1, pad_nodes = 1;
    for (int a = 0; a < n; ++a) {
        N[a] = grid.x[a].count;
        P[a] = 1;
        while (P[a] < 2 * N[a]) P[a] <<= 1;
        slice_nodes *= N[a];
        pad_nodes *= P[a];
    }
    using C = std::complex<double>;
    std::vector<C> buf(pad_nodes);
    fftw_plan fwd = fftw_plan_dft(n, P.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                  reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                  FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft(n, P.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                  reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                                  FFTW_ESTIMATE);

    const auto& sym = SymbolFunction::cached(n, 0, j);
    const auto& gl = gauss_legendre(8);
    const int nu = grid.u.count;
    const double hu = grid.u.spacing();

    auto pad_index = [&](const std::vector<int>& ix) {
        long flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * P[a] + ix[a];
        return flat;
    };

    // g_h = int_0^1 f(., h+s) * (r_j)_{(2^{h+s})} ds, one padded spectrum each
    std::vector<std::vector<double>> g(h_hi - h_lo + 1,
                                       std::vector<double>(slice_nodes, 0.0));
    std::vector<C> acc(pad_nodes);
    std::vector<int> ix(n, 0);
    for (int h = h_lo; h <= h_hi; ++h) {
        std::fill(acc.begin(), acc.end(), C(0.0));
        bool any = false;
        for (int q = 0; q < 8; ++q) {
            const double s = 0.5 + 0.5 * gl.nodes[q];
            const double ws = 0.5 * gl.weights[q];
            const double v = h + s;
            const double t = (v - grid.u.min) / hu;
            const int j0 = static_cast<int>(std::floor(t));
            const double frac = t - j0;
            if (j0 + 1 < 0 || j0 >= nu) continue;
            // slice of f at height h+s
            std::fill(buf.begin(), buf.end(), C(0.0));
            bool nonzero = false;
            for (long sidx = 0; sidx < slice_nodes; ++sidx) {
                long rem = sidx;
                for (int a = n - 1; a >= 0; --a) {
                    ix[a] = static_cast<int>(rem % N[a]);
                    rem /= N[a];
                }
                double val = 0.0;
                if (j0 >= 0 && j0 < nu) val += (1.0 - frac) * f.at(ix, j0);
                if (frac != 0.0 && j0 + 1 < nu) val += frac * f.at(ix, j0 + 1);
                if (val != 0.0) {
                    buf[pad_index(ix)] = val;
                    nonzero = true;
                }
            }
            if (!nonzero) continue;
            any = true;
            fftw_execute(fwd);
            // multiply by r_j_hat(lambda xi_m); frequencies of the padded box
            const double lambda = std::pow(2.0, v);
            std::vector<int> m(n, 0);
            double xi[3];
            for (long sidx = 0; sidx < pad_nodes; ++sidx) {
                long rem = sidx;
                for (int a = n - 1; a >= 0; --a) {
                    m[a] = static_cast<int>(rem % P[a]);
                    rem /= P[a];
                }
                for (int a = 0; a < n; ++a) {
                    int signed_m = m[a] <= P[a] / 2 ? m[a] : m[a] - P[a];
                    xi[a] = lambda * 2.0 * kPi * signed_m / (P[a] * grid.x[a].spacing());
                }
                acc[sidx] += ws * buf[sidx] * sym.at_or_zero(xi);
            }
        }
        if (!any) continue;
        std::copy(acc.begin(), acc.end(), buf.begin());
        fftw_execute(bwd);
        auto& out = g[h - h_lo];
        for (long sidx = 0; sidx < slice_nodes; ++sidx) {
            long rem = sidx;
            for (int a = n - 1; a >= 0; --a) {
                ix[a] = static_cast<int>(rem % N[a]);
                rem /= N[a];
            }
            out[sidx] = buf[pad_index(ix)].real() / pad_nodes;
        }
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);

    DiscreteTResult res;
    res.x_axes = grid.x;
    res.k_min = k_min;
    res.slices.assign(k_max - k_min + 1, std::vector<double>(slice_nodes, 0.0));
    for (int k = k_min; k <= k_max; ++k) {
        auto& out = res.slices[k - k_min];
        for (int h = std::max(h_lo, k + 1); h <= h_hi; ++h) {
            const double w = 1.0 / (h - k);
            const auto& gh = g[h - h_lo];
            for (long sidx = 0; sidx < slice_nodes; ++sidx) out[sidx] += w * gh[sidx];
        }
    }
    return res;
}

}  // namespace axb
