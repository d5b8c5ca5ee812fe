#include "axb/group.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace axb {

GroupPoint::GroupPoint(std::vector<double> xv, double uv) : x(std::move(xv)), u(uv) {
    if (x.empty()) throw std::invalid_argument("GroupPoint: dimension must be >= 1");
}

GroupPoint::GroupPoint(double x1, double uv) : x{x1}, u(uv) {}

double GroupPoint::norm_x_sq() const {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return s;
}

GroupPoint identity(int n) { return GroupPoint(std::vector<double>(n, 0.0), 0.0); }

GroupPoint multiply(const GroupPoint& p, const GroupPoint& q) {
    if (p.n() != q.n()) throw std::invalid_argument("multiply: dimension mismatch");
    GroupPoint r = p;
    const double scale = std::exp(p.u);
    for (int i = 0; i < p.n(); ++i) r.x[i] = p.x[i] + scale * q.x[i];
    r.u = p.u + q.u;
    return r;
}

GroupPoint invert(const GroupPoint& p) {
    GroupPoint r = p;
    const double scale = std::exp(-p.u);
    for (int i = 0; i < p.n(); ++i) r.x[i] = -scale * p.x[i];
    r.u = -p.u;
    return r;
}

double distance(const GroupPoint& p) {
    // cosh d = cosh u + e^{-u}|x|^2/2, evaluated through cosh u - 1 to stay
    // accurate near the identity.
    const double sh = std::sinh(0.5 * p.u);
    const double s = 2.0 * sh * sh + std::exp(-p.u) * p.norm_x_sq() / 2.0;
    return std::log1p(s + std::sqrt(s * (s + 2.0)));
}

double modular(const GroupPoint& p) { return std::exp(-static_cast<double>(p.n()) * p.u); }

long GridSpec::total_nodes() const {
    long t = u.count;
    for (const auto& ax : x) t *= ax.count;
    return t;
}

void GridSpec::validate() const {
    if (x.empty()) throw std::invalid_argument("GridSpec: need at least one x axis");
    auto check = [](const GridAxis& ax) {
        if (ax.count < 2) throw std::invalid_argument("GridSpec: axis counts must be >= 2");
        if (!(ax.max > ax.min)) throw std::invalid_argument("GridSpec: axis extent must be positive");
    };
    for (const auto& ax : x) check(ax);
    check(u);
}

bool GridSpec::operator==(const GridSpec& o) const {
    if (x.size() != o.x.size()) return false;
    auto same = [](const GridAxis& a, const GridAxis& b) {
        return a.min == b.min && a.max == b.max && a.count == b.count;
    };
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!same(x[i], o.x[i])) return false;
    return same(u, o.u);
}

GridSpec make_grid(int n, double x_extent, int nx, double u_extent, int nu) {
    GridSpec g;
    g.x.assign(n, GridAxis{-x_extent, x_extent, nx});
    g.u = GridAxis{-u_extent, u_extent, nu};
    g.validate();
    return g;
}

SampledFunction::SampledFunction(GridSpec grid) : grid_(std::move(grid)) {
    grid_.validate();
    values_.assign(grid_.total_nodes(), 0.0);
}

long SampledFunction::index(const std::vector<int>& ix, int iu) const {
    long flat = 0;
    for (int a = 0; a < grid_.n(); ++a) flat = flat * grid_.x[a].count + ix[a];
    return flat * grid_.u.count + iu;
}

namespace {

struct AxisHit {
    int i0;
    double frac;  // weight of node i0+1
};

inline AxisHit locate(const GridAxis& ax, double v) {
    const double t = (v - ax.min) / ax.spacing();
    const int i0 = static_cast<int>(std::floor(t));
    return {i0, t - i0};
}

}  // namespace

double SampledFunction::interpolate(const double* x, double u) const {
    const int n = grid_.n();
    AxisHit hits[4];
    for (int a = 0; a < n; ++a) hits[a] = locate(grid_.x[a], x[a]);
    hits[n] = locate(grid_.u, u);

    double acc = 0.0;
    const int corners = 1 << (n + 1);
    std::vector<int> ix(n);
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        bool inside = true;
        int iu = 0;
        for (int a = 0; a <= n; ++a) {
            const int hi = (c >> a) & 1;
            const int idx = hits[a].i0 + hi;
            const double wa = hi ? hits[a].frac : 1.0 - hits[a].frac;
            const int count = (a < n) ? grid_.x[a].count : grid_.u.count;
            if (idx < 0 || idx >= count) {
                inside = false;
                break;
            }
            w *= wa;
            if (a < n) ix[a] = idx;
            else iu = idx;
        }
        if (inside && w != 0.0) acc += w * values_[index(ix, iu)];
    }
    return acc;
}

namespace {

double trapezoid_weight(const GridAxis& ax, int i) {
    return (i == 0 || i == ax.count - 1) ? 0.5 * ax.spacing() : ax.spacing();
}

}  // namespace

double SampledFunction::integral() const {
    double s = 0.0;
    for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
        double w = trapezoid_weight(grid_.u, iu);
        for (int a = 0; a < grid_.n(); ++a) w *= trapezoid_weight(grid_.x[a], ix[a]);
        s += w * values_[flat];
    });
    return s;
}

double SampledFunction::integral_abs() const {
    double s = 0.0;
    for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
        double w = trapezoid_weight(grid_.u, iu);
        for (int a = 0; a < grid_.n(); ++a) w *= trapezoid_weight(grid_.x[a], ix[a]);
        s += w * std::abs(values_[flat]);
    });
    return s;
}

double SampledFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SampledFunction::boundary_max_abs() const {
    double m = 0.0;
    for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
        bool boundary = (iu == 0 || iu == grid_.u.count - 1);
        for (int a = 0; a < grid_.n() && !boundary; ++a)
            boundary = (ix[a] == 0 || ix[a] == grid_.x[a].count - 1);
        if (boundary) m = std::max(m, std::abs(values_[flat]));
    });
    return m;
}

SampledFunction involute(const SampledFunction& f) {
    SampledFunction out(f.grid());
    const int n = f.grid().n();
    out.fill([&](const double* x, double u) {
        const double scale = std::exp(-u);
        double y[4];
        for (int a = 0; a < n; ++a) y[a] = -scale * x[a];
        return std::exp(-static_cast<double>(n) * u) * f.interpolate(y, -u);
    });
    return out;
}

namespace {

void warn_boundary_decay(const SampledFunction& f) {
    const double m = f.max_abs();
    if (m > 0 && f.boundary_max_abs() > 1e-12 * m)
        std::fprintf(stderr, "axb: convolve: f does not decay below 1e-12 at the grid boundary\n");
}

SampledFunction convolve_direct(const SampledFunction& f, const SampledFunction& g) {
    const GridSpec& grid = f.grid();
    const int n = grid.n();
    SampledFunction out(grid);
    const double skip = 1e-14 * g.max_abs();

    // Quadrature nodes and weights over g's grid.
    std::vector<double> uw(grid.u.count), uval(grid.u.count);
    for (int j = 0; j < grid.u.count; ++j) {
        uw[j] = trapezoid_weight(grid.u, j);
        uval[j] = grid.u.at(j);
    }

    out.fill([&](const double* x, double u) {
        double acc = 0.0;
        std::vector<int> jx(n, 0);
        std::vector<double> xp(n), arg(n);
        while (true) {
            double wx = 1.0;
            for (int a = 0; a < n; ++a) {
                xp[a] = grid.x[a].at(jx[a]);
                wx *= trapezoid_weight(grid.x[a], jx[a]);
            }
            for (int j = 0; j < grid.u.count; ++j) {
                const double gv = g.at(jx, j);
                if (std::abs(gv) <= skip) continue;
                const double lambda = std::exp(u - uval[j]);
                for (int a = 0; a < n; ++a) arg[a] = x[a] - lambda * xp[a];
                acc += wx * uw[j] * gv * f.interpolate(arg.data(), u - uval[j]);
            }
            int a = n - 1;
            while (a >= 0 && ++jx[a] == grid.x[a].count) jx[a--] = 0;
            if (a < 0) break;
        }
        return acc;
    });
    return out;
}

int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// FFT path. For each (u_i, u_j) pair, the inner x'-integral is
//   int f(x - y, u_i - u_j) [lambda^{-n} g(y/lambda, u_j)] dy,  lambda = e^{u_i-u_j},
// approximated on the difference lattice y = q*h and evaluated as a discrete
// linear convolution. The f-slice at height d*h_u is cached per d = i-j.
SampledFunction convolve_fft(const SampledFunction& f, const SampledFunction& g) {
    const GridSpec& grid = f.grid();
    const int n = grid.n();
    const int nu = grid.u.count;

    std::vector<int> N(n), L(n), P(n);
    long slice_nodes = 1, conv_nodes = 1, pad_nodes = 1;
    for (int a = 0; a < n; ++a) {
        N[a] = grid.x[a].count;
        L[a] = 2 * N[a] - 1;             // difference-lattice length
        P[a] = next_pow2(N[a] + L[a]);   // linear convolution length
        slice_nodes *= N[a];
        conv_nodes *= L[a];
        pad_nodes *= P[a];
    }

    using cplx = std::complex<double>;
    std::vector<cplx> buf(pad_nodes), spec_acc(pad_nodes);
    fftw_plan fwd = fftw_plan_dft(n, P.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                  reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                  FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft(n, P.data(), reinterpret_cast<fftw_complex*>(spec_acc.data()),
                                  reinterpret_cast<fftw_complex*>(spec_acc.data()), FFTW_BACKWARD,
                                  FFTW_ESTIMATE);

    // Flat index helpers on the padded box.
    auto pad_index = [&](const std::vector<int>& ix) {
        long flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * P[a] + ix[a];
        return flat;
    };

    const double hu = grid.u.spacing();

    // f-slice spectra keyed by d = i - j (heights d*hu, linearly interpolated
    // between neighbouring stored slices).
    std::vector<std::vector<cplx>> fslice_spec(2 * nu - 1);
    auto f_spectrum = [&](int d) -> const std::vector<cplx>& {
        auto& slot = fslice_spec[d + nu - 1];
        if (!slot.empty()) return slot;
        const double v = d * hu;
        const double t = (v - grid.u.min) / hu;
        const int j0 = static_cast<int>(std::floor(t));
        const double frac = t - j0;
        std::fill(buf.begin(), buf.end(), cplx(0.0));
        std::vector<int> ix(n, 0);
        for (long s = 0; s < slice_nodes; ++s) {
            long rem = s;
            for (int a = n - 1; a >= 0; --a) {
                ix[a] = static_cast<int>(rem % N[a]);
                rem /= N[a];
            }
            double val = 0.0;
            if (j0 >= 0 && j0 < nu) val += (1.0 - frac) * f.at(ix, j0);
            if (frac != 0.0 && j0 + 1 >= 0 && j0 + 1 < nu) val += frac * f.at(ix, j0 + 1);
            buf[pad_index(ix)] = val;
        }
        fftw_execute(fwd);
        slot.assign(buf.begin(), buf.end());
        return slot;
    };

    SampledFunction out(grid);
    std::vector<double> xq(n);
    std::vector<int> ix(n, 0);

    for (int i = 0; i < nu; ++i) {
        std::fill(spec_acc.begin(), spec_acc.end(), cplx(0.0));
        for (int j = 0; j < nu; ++j) {
            const int d = i - j;
            const double lambda = std::exp(d * hu);
            const double w = trapezoid_weight(grid.u, j);
            const auto& fs = f_spectrum(d);  // fills buf; must precede the g resample
            // Rescaled g-slice on the difference lattice, stored with offset
            // N[a]-1 so that the convolution index is free of sign handling.
            std::fill(buf.begin(), buf.end(), cplx(0.0));
            std::vector<int> q(n, 0);
            const double scale = std::pow(lambda, -n);
            bool any = false;
            for (long s = 0; s < conv_nodes; ++s) {
                long rem = s;
                for (int a = n - 1; a >= 0; --a) {
                    q[a] = static_cast<int>(rem % L[a]);
                    rem /= L[a];
                }
                for (int a = 0; a < n; ++a)
                    xq[a] = (q[a] - (N[a] - 1)) * grid.x[a].spacing() / lambda;
                double gv = 0.0;
                {
                    // interpolate g(., u_j) at xq: multilinear on the x axes
                    AxisHit hits[3];
                    bool inside = true;
                    for (int a = 0; a < n; ++a) hits[a] = locate(grid.x[a], xq[a]);
                    const int corners = 1 << n;
                    for (int c = 0; c < corners && inside; ++c) {
                        double wt = 1.0;
                        bool ok = true;
                        for (int a = 0; a < n; ++a) {
                            const int hi = (c >> a) & 1;
                            const int idx = hits[a].i0 + hi;
                            if (idx < 0 || idx >= N[a]) {
                                ok = false;
                                break;
                            }
                            wt *= hi ? hits[a].frac : 1.0 - hits[a].frac;
                            ix[a] = idx;
                        }
                        if (ok && wt != 0.0) gv += wt * g.at(ix, j);
                    }
                }
                if (gv != 0.0) {
                    buf[pad_index(q)] = scale * gv;
                    any = true;
                }
            }
            if (!any) continue;
            fftw_execute(fwd);
            for (long s = 0; s < pad_nodes; ++s) spec_acc[s] += w * fs[s] * buf[s];
        }
        fftw_execute(bwd);
        // out(x_k, u_i) = h^n * conv[k + N - 1] / pad_nodes
        double cell = 1.0 / static_cast<double>(pad_nodes);
        for (int a = 0; a < n; ++a) cell *= grid.x[a].spacing();
        std::vector<int> k(n, 0);
        for (long s = 0; s < slice_nodes; ++s) {
            long rem = s;
            for (int a = n - 1; a >= 0; --a) {
                k[a] = static_cast<int>(rem % N[a]);
                rem /= N[a];
            }
            std::vector<int> shifted(n);
            for (int a = 0; a < n; ++a) shifted[a] = k[a] + N[a] - 1;
            out.at(k, i) = cell * spec_acc[pad_index(shifted)].real();
        }
    }

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return out;
}

}  // namespace

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g, ConvMethod method) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("convolve: grid mismatch");
    warn_boundary_decay(f);
    if (method == ConvMethod::automatic) {
        const double direct_work =
            static_cast<double>(f.grid().total_nodes()) * static_cast<double>(f.grid().total_nodes());
        method = direct_work > 2e8 ? ConvMethod::fft : ConvMethod::direct;
    }
    return method == ConvMethod::fft ? convolve_fft(f, g) : convolve_direct(f, g);
}

void save_csv(const SampledFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    nlohmann::ordered_json hdr;
    hdr["n"] = f.grid().n();
    for (const auto& ax : f.grid().x) {
        hdr["x_min"].push_back(ax.min);
        hdr["x_max"].push_back(ax.max);
        hdr["nx"].push_back(ax.count);
    }
    hdr["u_min"] = f.grid().u.min;
    hdr["u_max"] = f.grid().u.max;
    hdr["nu"] = f.grid().u.count;
    out << hdr.dump() << '\n';
    for (int a = 0; a < f.grid().n(); ++a) out << 'x' << (a + 1) << ',';
    out << "u,value\n";
    char buf[40];
    f.for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
        for (int a = 0; a < f.grid().n(); ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", f.grid().x[a].at(ix[a]));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", f.grid().u.at(iu));
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", f.values()[flat]);
        out << buf << '\n';
    });
}

SampledFunction load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file");
    const auto hdr = nlohmann::json::parse(line);
    GridSpec grid;
    const int n = hdr.at("n").get<int>();
    for (int a = 0; a < n; ++a)
        grid.x.push_back(GridAxis{hdr.at("x_min")[a].get<double>(), hdr.at("x_max")[a].get<double>(),
                                  hdr.at("nx")[a].get<int>()});
    grid.u = GridAxis{hdr.at("u_min").get<double>(), hdr.at("u_max").get<double>(),
                      hdr.at("nu").get<int>()};
    SampledFunction f(grid);
    std::getline(in, line);  // column header
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto pos = line.find_last_of(',');
        if (pos == std::string::npos) throw std::runtime_error("load_csv: malformed row");
        if (count >= static_cast<long>(f.values().size()))
            throw std::runtime_error("load_csv: too many rows for grid");
        f.values()[count++] = std::stod(line.substr(pos + 1));
    }
    if (count != static_cast<long>(f.values().size()))
        throw std::runtime_error("load_csv: row count does not match grid");
    return f;
}

}  // namespace axb
