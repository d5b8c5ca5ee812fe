#include "axb/multiplier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "axb/common.hpp"

namespace axb {

namespace {

// c * x^beta * (1 + |x|^2)^{-p}; closed under the derivatives we need.
struct RatTerm {
    double c;
    int beta[3];
    double p;
};

std::vector<RatTerm> differentiate(const std::vector<RatTerm>& terms, int axis) {
    std::vector<RatTerm> out;
    for (const auto& t : terms) {
        if (t.beta[axis] > 0) {
            RatTerm a = t;
            a.c *= t.beta[axis];
            a.beta[axis] -= 1;
            out.push_back(a);
        }
        RatTerm b = t;
        b.c *= -2.0 * t.p;
        b.beta[axis] += 1;
        b.p += 1.0;
        out.push_back(b);
    }
    return out;
}

// r_{alpha,j} = (-1)^{|alpha|} d^alpha (x^alpha r_j)
std::vector<RatTerm> profile_terms(int n, unsigned alpha, int j) {
    RatTerm base{1.0, {0, 0, 0}, 1.0 + 0.5 * n};
    if (j >= 1) base.beta[j - 1] = 1;
    std::vector<RatTerm> terms{base};
    int order = 0;
    for (int a = 0; a < n; ++a) {
        if (alpha & (1u << a)) {
            for (auto& t : terms) t.beta[a] += 1;
            ++order;
        }
    }
    for (int a = 0; a < n; ++a)
        if (alpha & (1u << a)) terms = differentiate(terms, a);
    if (order % 2) {
        for (auto& t : terms) t.c = -t.c;
    }
    return terms;
}

double eval_terms(const std::vector<RatTerm>& terms, const double* x, int n) {
    double q = 0.0;
    for (int a = 0; a < n; ++a) q += x[a] * x[a];
    double acc = 0.0;
    for (const auto& t : terms) {
        double mono = t.c;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < t.beta[a]; ++b) mono *= x[a];
        acc += mono * std::pow(1.0 + q, -t.p);
    }
    return acc;
}

struct GridPlan {
    double half_extent;  // x in [-X, X]
    double h;            // x spacing
};

GridPlan symbol_grid_plan(int n) {
    switch (n) {
        case 1: return {256.0, 1.0 / 64.0};
        case 2: return {16.0, 1.0 / 32.0};
        case 3: return {16.0, 1.0 / 4.0};
        default: throw std::invalid_argument("SymbolFunction: n supported in 1..3");
    }
}

}  // namespace

SymbolFunction::SymbolFunction(int n, unsigned alpha_mask, int j) : n_(n), j_(j), alpha_(alpha_mask) {
    if (n < 1 || n > 3) throw std::invalid_argument("SymbolFunction: n supported in 1..3");
    if (j < 0 || j > n) throw std::invalid_argument("SymbolFunction: j out of range");
    if (alpha_mask >= (1u << n)) throw std::invalid_argument("SymbolFunction: alpha mask out of range");

    const GridPlan plan = symbol_grid_plan(n);
    const int M = static_cast<int>(std::llround(plan.half_extent / plan.h));
    const int N = 2 * M + 1;
    half_ = M;
    dxi_ = 2.0 * kPi / (N * plan.h);
    band_edge_ = kPi / (2.0 * plan.h);

    const auto terms = profile_terms(n, alpha_mask, j);

    long total = 1;
    for (int a = 0; a < n; ++a) total *= N;
    std::vector<cplx> buf(total);
    {
        double x[3] = {0, 0, 0};
        std::vector<int> idx(n, 0);
        for (long s = 0; s < total; ++s) {
            long rem = s;
            for (int a = n - 1; a >= 0; --a) {
                idx[a] = static_cast<int>(rem % N);
                rem /= N;
            }
            for (int a = 0; a < n; ++a) x[a] = (idx[a] - M) * plan.h;
            buf[s] = eval_terms(terms, x, n);
        }
    }
    {
        std::vector<int> dims(n, N);
        fftw_plan fp = fftw_plan_dft(n, dims.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                     reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                     FFTW_ESTIMATE);
        fftw_execute(fp);
        fftw_destroy_plan(fp);
    }
    // reorder to signed frequencies with the continuous-transform phase:
    // r^(xi_m) = h^n exp(i 2 pi <m, M> / N) DFT[m mod N]
    data_.assign(total, cplx(0.0));
    const double hn = std::pow(plan.h, n);
    std::vector<int> m(n, 0);
    for (long s = 0; s < total; ++s) {
        long rem = s;
        for (int a = n - 1; a >= 0; --a) {
            m[a] = static_cast<int>(rem % N) - M;  // signed
            rem /= N;
        }
        long src = 0;
        double phase = 0.0;
        for (int a = 0; a < n; ++a) {
            const int wrapped = (m[a] % N + N) % N;
            src = src * N + wrapped;
            phase += 2.0 * kPi * static_cast<double>(m[a]) * M / N;
        }
        data_[s] = hn * std::polar(1.0, phase) * buf[src];
    }
}

cplx SymbolFunction::interpolate(const double* xi) const {
    const int N = 2 * half_ + 1;
    double t[3];
    int i0[3];
    for (int a = 0; a < n_; ++a) {
        t[a] = xi[a] / dxi_ + half_;
        i0[a] = static_cast<int>(std::floor(t[a]));
        t[a] -= i0[a];
    }
    cplx acc(0.0);
    for (int c = 0; c < (1 << n_); ++c) {
        double w = 1.0;
        long idx = 0;
        bool ok = true;
        for (int a = 0; a < n_; ++a) {
            const int hi = (c >> a) & 1;
            const int ia = i0[a] + hi;
            if (ia < 0 || ia >= N) {
                ok = false;
                break;
            }
            w *= hi ? t[a] : 1.0 - t[a];
            idx = idx * N + ia;
        }
        if (ok && w != 0.0) acc += w * data_[idx];
    }
    return acc;
}

cplx SymbolFunction::at(const double* xi) const {
    for (int a = 0; a < n_; ++a)
        if (std::abs(xi[a]) > band_edge_)
            throw std::domain_error("SymbolFunction: frequency outside the resolved band");
    return interpolate(xi);
}

cplx SymbolFunction::at_or_zero(const double* xi) const {
    if (band_edge_ < 30.0)
        throw std::domain_error(
            "SymbolFunction: band edge below 30, out-of-band arguments are not negligible");
    for (int a = 0; a < n_; ++a)
        if (std::abs(xi[a]) > band_edge_) return cplx(0.0);
    return interpolate(xi);
}

const SymbolFunction& SymbolFunction::cached(int n, unsigned alpha_mask, int j) {
    static std::map<std::tuple<int, unsigned, int>, SymbolFunction> registry;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_tuple(n, alpha_mask, j);
    auto it = registry.find(key);
    if (it == registry.end())
        it = registry.emplace(key, SymbolFunction(n, alpha_mask, j)).first;
    return it->second;
}

cplx symbol_S(int n, unsigned alpha_mask, int j, const double* xi) {
    return SymbolFunction::cached(n, alpha_mask, j).at(xi);
}

SymbolDecayFit fit_symbol_decay(int n, unsigned alpha_mask, int j, double xi_lo, double xi_hi,
                                int count) {
    const auto& sym = SymbolFunction::cached(n, alpha_mask, j);
    std::vector<double> xs, ys;
    for (double x : logspace(xi_lo, xi_hi, count)) {
        double xi[3] = {x, 0, 0};
        const double mag = std::abs(sym.at(xi));
        if (mag <= 0.0) continue;
        xs.push_back(std::log(std::min(x, 1.0 / x)));
        ys.push_back(std::log(mag));
    }
    const auto fit = linear_fit(xs, ys);
    SymbolDecayFit out;
    out.epsilon = fit.slope;
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        c = std::max(c, std::exp(ys[i] - fit.slope * xs[i]));
    out.constant = c;
    return out;
}

// ---------------------------------------------------------------------------
// IntegralOperator1D
// ---------------------------------------------------------------------------

IntegralOperator1D::IntegralOperator1D(const GridAxis& axis) : axis_(axis) {
    if (axis.count < 2) throw std::invalid_argument("IntegralOperator1D: need at least 2 nodes");
    kernel_.setZero(axis.count, axis.count);
    weights_.resize(axis.count);
    const double h = axis.spacing();
    for (int i = 0; i < axis.count; ++i)
        weights_[i] = (i == 0 || i == axis.count - 1) ? 0.5 * h : h;
}

void IntegralOperator1D::check_finite() const {
    if (!kernel_.allFinite())
        throw std::invalid_argument("IntegralOperator1D: kernel has non-finite entries");
}

IntegralOperator1D IntegralOperator1D::identity(const GridAxis& axis) {
    IntegralOperator1D op(axis);
    for (int i = 0; i < axis.count; ++i) op.kernel_(i, i) = 1.0 / op.weights_[i];
    return op;
}

Eigen::VectorXcd IntegralOperator1D::apply(const Eigen::VectorXcd& f) const {
    if (f.size() != kernel_.cols()) throw std::invalid_argument("apply: size mismatch");
    return kernel_ * (weights_.cast<cplx>().asDiagonal() * f);
}

IntegralOperator1D build_multiplier_operator(const KernelId& id, const double* xi,
                                             unsigned alpha_mask, const GridAxis& axis) {
    id.validate();
    if (id.variant != KernelVariant::K0 && id.variant != KernelVariant::Kj &&
        id.variant != KernelVariant::K0_tilde)
        throw std::invalid_argument("build_multiplier_operator: variant must be K0, Kj or K0_tilde");
    double norm = 0.0;
    for (int a = 0; a < id.n; ++a) norm += xi[a] * xi[a];
    if (norm == 0.0) throw std::invalid_argument("build_multiplier_operator: xi must be nonzero");

    const auto& sym = SymbolFunction::cached(id.n, alpha_mask, std::max(id.j, 0));
    IntegralOperator1D op(axis);
    const int nu = axis.count;

    // S(e^{u_k} xi) for every node
    std::vector<cplx> s_at(nu);
    double arg[3];
    for (int k = 0; k < nu; ++k) {
        const double scale = std::exp(axis.at(k));
        for (int a = 0; a < id.n; ++a) arg[a] = scale * xi[a];
        s_at[k] = sym.at_or_zero(arg);
    }

    const double h = axis.spacing();
    for (int i = 0; i < nu; ++i) {
        for (int k = 0; k < nu; ++k) {
            // index form keeps the indicator and divisor exactly
            // translation-covariant under grid-aligned shifts
            const double d = (i - k) * h;
            cplx v(0.0);
            switch (id.variant) {
                case KernelVariant::K0:
                    if (d >= 1.0) v = (s_at[i] - s_at[k]) / d;
                    break;
                case KernelVariant::Kj:
                    if (d <= -1.0) v = s_at[k] / d;
                    break;
                case KernelVariant::K0_tilde:
                    if (std::abs(d) >= 1.0) v = s_at[k] / d;
                    break;
                default:
                    break;
            }
            op.kernel_(i, k) = v;
        }
    }
    op.check_finite();
    return op;
}

// ---------------------------------------------------------------------------
// Weights and norms
// ---------------------------------------------------------------------------

double a2_characteristic(const std::vector<double>& samples) {
    const int m = static_cast<int>(samples.size());
    if (m < 1) throw std::invalid_argument("a2_characteristic: empty samples");
    std::vector<double> pre_w(m + 1, 0.0), pre_iw(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        if (!(samples[i] > 0.0))
            throw std::invalid_argument("a2_characteristic: samples must be strictly positive");
        pre_w[i + 1] = pre_w[i] + samples[i];
        pre_iw[i + 1] = pre_iw[i] + 1.0 / samples[i];
    }
    double sup = 1.0;
    for (int len = 1; len <= m; len <<= 1) {
        for (int start = 0; start + len <= m; start += len) {
            const double aw = (pre_w[start + len] - pre_w[start]) / len;
            const double aiw = (pre_iw[start + len] - pre_iw[start]) / len;
            sup = std::max(sup, aw * aiw);
        }
    }
    return sup;
}

MuckenhouptWeight MuckenhouptWeight::constant(double c, const GridAxis& axis) {
    if (!(c > 0)) throw std::invalid_argument("MuckenhouptWeight: constant must be positive");
    MuckenhouptWeight w;
    w.samples.assign(axis.count, c);
    w.a2_estimate = 1.0;
    return w;
}

MuckenhouptWeight MuckenhouptWeight::power(double a, const GridAxis& axis) {
    if (!(a > -1.0 && a < 1.0))
        throw std::invalid_argument("MuckenhouptWeight: power exponent in (-1,1)");
    MuckenhouptWeight w;
    w.samples.resize(axis.count);
    for (int i = 0; i < axis.count; ++i) {
        const double u = axis.at(i);
        if (u == 0.0)
            throw std::invalid_argument("MuckenhouptWeight: power weight needs a grid avoiding 0");
        w.samples[i] = std::pow(std::abs(u), a);
    }
    w.a2_estimate = a2_characteristic(w.samples);
    return w;
}

MuckenhouptWeight MuckenhouptWeight::from_samples(std::vector<double> s) {
    MuckenhouptWeight w;
    w.samples = std::move(s);
    w.a2_estimate = a2_characteristic(w.samples);
    return w;
}

MuckenhouptWeight MuckenhouptWeight::inverted() const {
    MuckenhouptWeight w;
    w.samples.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) w.samples[i] = 1.0 / samples[i];
    w.a2_estimate = a2_estimate;
    return w;
}

double weighted_opnorm(const IntegralOperator1D& op, const MuckenhouptWeight& w,
                       const PowerIterOptions& opts) {
    const int m = op.axis().count;
    if (static_cast<int>(w.samples.size()) != m)
        throw std::invalid_argument("weighted_opnorm: weight grid mismatch");

    // A = D^{1/2} K Q D^{-1/2}, D = diag(w q), Q = diag(q)
    Eigen::VectorXd d(m);
    for (int i = 0; i < m; ++i) d[i] = w.samples[i] * op.quad_weights()[i];
    Eigen::MatrixXcd A = op.kernel();
    for (int i = 0; i < m; ++i) {
        const double row = std::sqrt(d[i]);
        for (int k = 0; k < m; ++k) A(i, k) *= row * op.quad_weights()[k] / std::sqrt(d[k]);
    }

    Rng rng(opts.seed);
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i) v[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        // two Gram applications per sweep squares the convergence ratio
        for (int rep = 0; rep < 2; ++rep) {
            Eigen::VectorXcd g = A.adjoint() * (A * v);
            const double ng = g.norm();
            if (ng == 0.0) return 0.0;
            v = g / ng;
        }
        const double est = (A * v).norm();
        if (it > 0 && std::abs(est - sigma) <= opts.rel_tol * est) return est;
        sigma = est;
    }
    throw std::runtime_error("weighted_opnorm: power iteration did not converge within budget");
}

IntegralOperator1D build_model_kernel(ModelKernel kind, double eps, const GridAxis& axis) {
    if (kind != ModelKernel::W && !(eps > 0))
        throw std::invalid_argument("build_model_kernel: eps must be positive for Z kernels");
    switch (kind) {
        case ModelKernel::W:
            return IntegralOperator1D::from_kernel(axis, [](double u, double up) {
                return cplx(1.0 / std::sqrt(u * u + up * up));
            });
        case ModelKernel::Zeps:
            return IntegralOperator1D::from_kernel(axis, [eps](double u, double up) {
                const double d = std::abs(u - up);
                return cplx(d >= 1.0 ? std::exp(-eps * std::abs(u)) / d : 0.0);
            });
        case ModelKernel::ZepsStar:
            return IntegralOperator1D::from_kernel(axis, [eps](double u, double up) {
                const double d = std::abs(u - up);
                return cplx(d >= 1.0 ? std::exp(-eps * std::abs(up)) / d : 0.0);
            });
    }
    throw std::invalid_argument("build_model_kernel: unknown kind");
}

double model_kernel_opnorm(ModelKernel kind, double eps, const MuckenhouptWeight& w,
                           const GridAxis& axis, const PowerIterOptions& opts) {
    return weighted_opnorm(build_model_kernel(kind, eps, axis), w, opts);
}

double schur_bound_rowcol(const IntegralOperator1D& op) {
    const int m = op.axis().count;
    double row = 0.0, col = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        for (int k = 0; k < m; ++k) r += std::abs(op.kernel()(i, k)) * op.quad_weights()[k];
        row = std::max(row, r);
    }
    for (int k = 0; k < m; ++k) {
        double c = 0.0;
        for (int i = 0; i < m; ++i) c += std::abs(op.kernel()(i, k)) * op.quad_weights()[i];
        col = std::max(col, c);
    }
    return std::sqrt(row * col);
}

double schur_bound_weighted(const IntegralOperator1D& op,
                            const std::function<double(double)>& p) {
    const int m = op.axis().count;
    std::vector<double> pv(m);
    for (int i = 0; i < m; ++i) pv[i] = p(op.axis().at(i));
    double c1 = 0.0, c2 = 0.0;
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            s += std::abs(op.kernel()(i, k)) * pv[k] * op.quad_weights()[k];
        c1 = std::max(c1, s / pv[i]);
    }
    for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += std::abs(op.kernel()(i, k)) * pv[i] * op.quad_weights()[i];
        c2 = std::max(c2, s / pv[k]);
    }
    return std::sqrt(c1 * c2);
}

// ---------------------------------------------------------------------------
// Representation
// ---------------------------------------------------------------------------

namespace {

void check_representation_inputs(const SampledFunction& K, const Eigen::VectorXcd& phi) {
    const int n = K.grid().n();
    if (n > 2) throw std::invalid_argument("representation_apply: n supported in 1..2");
    if (phi.size() != K.grid().u.count)
        throw std::invalid_argument("representation_apply: phi must live on K's u-grid");
    // integrability estimate: boundary mass must be negligible
    if (K.boundary_max_abs() > 1e-8 * std::max(K.max_abs(), 1e-300))
        throw std::invalid_argument("representation_apply: K does not decay on its grid");
}

}  // namespace

Eigen::VectorXcd representation_apply_direct(const SampledFunction& K, const double* xi,
                                             const Eigen::VectorXcd& phi) {
    check_representation_inputs(K, phi);
    const GridSpec& grid = K.grid();
    const int n = grid.n();
    const int nu = grid.u.count;
    const double hu = grid.u.spacing();

    // phi(s - u) lands on the s-grid when (s_i - u_k) - u_min is a multiple of
    // hu; in general interpolate linearly with zero extension.
    auto phi_at = [&](double s) -> cplx {
        const double t = (s - grid.u.min) / hu;
        const int i0 = static_cast<int>(std::floor(t));
        const double f = t - i0;
        cplx acc(0.0);
        if (i0 >= 0 && i0 < nu) acc += (1.0 - f) * phi[i0];
        if (f != 0.0 && i0 + 1 >= 0 && i0 + 1 < nu) acc += f * phi[i0 + 1];
        return acc;
    };

    // plain rectangle weights: both routes then evaluate identical sums in a
    // different order, so their agreement checks the representation identity
    // itself rather than quadrature differences
    double cell = hu;
    for (int a = 0; a < n; ++a) cell *= grid.x[a].spacing();

    Eigen::VectorXcd out(nu);
    for (int i = 0; i < nu; ++i) {
        const double s = grid.u.at(i);
        cplx acc(0.0);
        K.for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
            const double Kv = K.values()[flat];
            if (Kv == 0.0) return;
            const double u = grid.u.at(iu);
            double dot = 0.0;
            for (int a = 0; a < n; ++a) dot += xi[a] * grid.x[a].at(ix[a]);
            acc += Kv * std::polar(1.0, -std::exp(s - u) * dot) * phi_at(s - u);
        });
        out[i] = cell * acc;
    }
    return out;
}

Eigen::VectorXcd representation_apply_via_kernel(const SampledFunction& K, const double* xi,
                                                 const Eigen::VectorXcd& phi) {
    check_representation_inputs(K, phi);
    const GridSpec& grid = K.grid();
    const int n = grid.n();
    const int nu = grid.u.count;
    const double hu = grid.u.spacing();

    double xcell = 1.0;
    for (int a = 0; a < n; ++a) xcell *= grid.x[a].spacing();

    // (F K)(eta, v): partial Fourier transform in x of the (interpolated)
    // slice at height v, evaluated by direct summation at the exact frequency.
    auto partial_ft = [&](const double* eta, double v) -> cplx {
        const double t = (v - grid.u.min) / hu;
        const int j0 = static_cast<int>(std::floor(t));
        const double f = t - j0;
        if (j0 + 1 < 0 || j0 >= nu) return cplx(0.0);
        cplx acc(0.0);
        std::vector<int> ix(n, 0);
        long slice = 1;
        for (int a = 0; a < n; ++a) slice *= grid.x[a].count;
        for (long s = 0; s < slice; ++s) {
            long rem = s;
            double dot = 0.0;
            for (int a = n - 1; a >= 0; --a) {
                ix[a] = static_cast<int>(rem % grid.x[a].count);
                rem /= grid.x[a].count;
            }
            for (int a = 0; a < n; ++a) dot += eta[a] * grid.x[a].at(ix[a]);
            double Kv = 0.0;
            if (j0 >= 0) Kv += (1.0 - f) * K.at(ix, j0);
            if (f != 0.0 && j0 + 1 < nu) Kv += f * K.at(ix, j0 + 1);
            if (Kv != 0.0) acc += Kv * std::polar(1.0, -dot);
        }
        return xcell * acc;
    };

    Eigen::MatrixXcd H(nu, nu);
    double eta[3];
    for (int k = 0; k < nu; ++k) {
        const double scale = std::exp(grid.u.at(k));
        for (int a = 0; a < n; ++a) eta[a] = scale * xi[a];
        for (int i = 0; i < nu; ++i) {
            H(i, k) = partial_ft(eta, grid.u.at(i) - grid.u.at(k));
        }
    }
    Eigen::VectorXcd out(nu);
    for (int i = 0; i < nu; ++i) {
        cplx acc(0.0);
        for (int k = 0; k < nu; ++k) acc += H(i, k) * phi[k];
        out[i] = hu * acc;
    }
    return out;
}

double scaling_covariance_check(const KernelId& id, const double* xi, unsigned alpha_mask,
                                const GridAxis& axis, double v) {
    const double h = axis.spacing();
    const double shift = v / h;
    const long r = std::llround(shift);
    if (std::abs(shift - r) > 1e-9)
        throw std::invalid_argument("scaling_covariance_check: v must be grid-aligned");

    double xiv[3];
    const double ev = std::exp(v);
    for (int a = 0; a < id.n; ++a) xiv[a] = ev * xi[a];
    const auto lhs = build_multiplier_operator(id, xiv, alpha_mask, axis);
    const auto rhs = build_multiplier_operator(id, xi, alpha_mask, axis);

    const int nu = axis.count;
    const long m = std::abs(r);
    double residual = 0.0;
    for (long i = m; i + m < nu; ++i) {
        for (long k = m; k + m < nu; ++k) {
            // (tau_{-v} M tau_v)(u,u') = H(u+v, u'+v)
            const cplx a = lhs.kernel()(i, k);
            const cplx b = rhs.kernel()(i + r, k + r);
            residual = std::max(residual, std::abs(a - b));
        }
    }
    return residual;
}

}  // namespace axb
