#include "axb/profiles.hpp"

#include <cmath>
#include <stdexcept>

#include "axb/autodiff.hpp"
#include "axb/common.hpp"

namespace axb {

namespace {

double stable_arccosh1p(double s) {
    // arccosh(1 + s) for s >= 0
    return std::log1p(s + std::sqrt(s * (s + 2.0)));
}

template <class T>
double value_of(const T& t) {
    if constexpr (std::is_same_v<T, double>) return t;
    else return value_of(t.v);
}

}  // namespace

// ---------------------------------------------------------------------------
// Legendre Q^0_{lambda-1/2}
// ---------------------------------------------------------------------------

double legendre_q(double lambda, double z, const QuadratureConfig& cfg, LegendreRoute route) {
    cfg.validate();
    if (!(lambda > 0)) throw std::domain_error("legendre_q: lambda must be positive");
    if (!(z > 1)) throw std::domain_error("legendre_q: z must exceed 1");

    const int levels = std::max(cfg.panels, 40);
    const int nodes = cfg.nodes_per_panel;

    if (route == LegendreRoute::compact) {
        // 2^{-lambda-1/2} int_{-1}^1 (z-s)^{-lambda-1/2} (1-s^2)^{lambda-1/2} ds,
        // each half mapped by s = +-(1 - w^2) so the endpoint factor becomes
        // 2 w^{2 lambda} (2-w^2)^{lambda-1/2}.
        auto right = [&](double w) {
            const double s = 1.0 - w * w;
            return 2.0 * std::pow(w, 2.0 * lambda - 1.0) * w *
                   std::pow(2.0 - w * w, lambda - 0.5) * std::pow(z - s, -lambda - 0.5);
        };
        auto left = [&](double w) {
            const double s = -1.0 + w * w;
            return 2.0 * std::pow(w, 2.0 * lambda - 1.0) * w *
                   std::pow(2.0 - w * w, lambda - 0.5) * std::pow(z - s, -lambda - 0.5);
        };
        const double val = integrate_graded(right, 0.0, 1.0, true, false, levels, nodes) +
                           integrate_graded(left, 0.0, 1.0, true, false, levels, nodes);
        return std::pow(2.0, -lambda - 0.5) * val;
    }

    // cosh route: 2^{-1/2} int_r^inf e^{-lambda x} (cosh x - cosh r)^{-1/2} dx
    // with r = arccosh z; near x = r substitute cosh x - cosh r = w^2.
    const double r = stable_arccosh1p(z - 1.0);
    const double coshr = z;
    auto x_of_w = [&](double w) { return stable_arccosh1p((z - 1.0) + w * w); };
    auto near = [&](double w) {
        const double x = x_of_w(w);
        return 2.0 * std::exp(-lambda * x) / std::sinh(x);
    };
    const double w_split = std::sqrt(std::cosh(r + 1.0) - coshr);
    const double head = integrate(near, 0.0, w_split, std::max(4, cfg.panels / 4), nodes);
    auto far = [&](double x) {
        return std::exp(-lambda * x) / std::sqrt(std::cosh(x) - coshr);
    };
    const double tail = integrate_tail(far, r + 1.0, 1.0, cfg);
    return (head + tail) / std::sqrt(2.0);
}

// ---------------------------------------------------------------------------
// Psi_0 and nested-dual evaluation
// ---------------------------------------------------------------------------

namespace {

template <class T>
T psi0_expr(const T& X) {
    if (value_of(X) < 1e8) {
        const T root = sqrt((X - 1.0) * (X + 1.0));
        return 1.0 / (root * log(X + root));
    }
    // factored form (X log X)^{-1} G(1/X, 1/log X); avoids overflow up to 1e300
    const T a = 1.0 / X;
    const T b = 1.0 / log(X);
    const T root = sqrt(1.0 - a * a);
    const T G = (1.0 / root) / (1.0 + b * log(1.0 + root));
    return G * b * a;
}

struct Psi0Fn {
    template <class T>
    T operator()(const T& X) const {
        return psi0_expr(X);
    }
};

}  // namespace

double psi0(int k, double X) {
    if (!(X > 1)) throw std::domain_error("psi0: X must exceed 1");
    if (X > 1e300) throw std::domain_error("psi0: X capped at 1e300");
    if (k < 0 || k > 8) throw std::invalid_argument("psi0: derivative order in 0..8");
    return nth_derivative(Psi0Fn{}, X, k);
}

// ---------------------------------------------------------------------------
// Psi_1 via the single s-integral
// ---------------------------------------------------------------------------

std::vector<double> falling_product_coeffs(int k) {
    if (k < 0 || k > 10) throw std::invalid_argument("falling_product_coeffs: k in 0..10");
    std::vector<double> c{1.0};
    for (int i = 0; i < k; ++i) {
        std::vector<double> next(c.size() + 1, 0.0);
        const double a = 0.5 + i;
        for (std::size_t l = 0; l < c.size(); ++l) {
            next[l] += a * c[l];
            next[l + 1] += c[l];
        }
        c = std::move(next);
    }
    return c;
}

double psi1(int k, double X, const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(X > 1)) throw std::domain_error("psi1: X must exceed 1");
    if (k < 0 || k > 8) throw std::invalid_argument("psi1: derivative order in 0..8");

    const auto c = falling_product_coeffs(k);
    const int levels = std::max(cfg.panels, 48);
    const int nodes = cfg.nodes_per_panel;

    // I_l = int_{-1}^1 (1-s^2)^{-1/2} (X-s)^{-1/2-k} / log^{l+1}(2(X-s)/(1-s^2)) ds.
    // Both halves use s = +-(1 - w^2); the remaining endpoint behaviour is a
    // negative power of log(1/w), handled by geometric grading toward w = 0.
    double total = 0.0;
    double lfact = 1.0;
    for (int l = 0; l <= k; ++l) {
        if (l > 0) lfact *= l;
        auto half = [&](double w, bool rightside) {
            const double w2 = w * w;
            const double one_minus_s2 = w2 * (2.0 - w2);
            const double Xms = rightside ? (X - 1.0) + w2 : (X + 1.0) - w2;
            const double lg = std::log(2.0 * Xms / one_minus_s2);
            return 2.0 / std::sqrt(2.0 - w2) * std::pow(Xms, -0.5 - k) /
                   std::pow(lg, l + 1);
        };
        const double Il =
            integrate_graded([&](double w) { return half(w, true); }, 0.0, 1.0, true, false,
                             levels, nodes) +
            integrate_graded([&](double w) { return half(w, false); }, 0.0, 1.0, true, false,
                             levels, nodes);
        total += lfact * c[l] * Il;
    }
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign / std::sqrt(kPi) * total;
}

// ---------------------------------------------------------------------------
// Phi_n and asymptotics
// ---------------------------------------------------------------------------

double phi(int n, int k, double X, const QuadratureConfig& cfg) {
    if (n < 1 || n > 6) throw std::invalid_argument("phi: n supported in 1..6");
    if (k < 0) throw std::invalid_argument("phi: derivative order must be nonnegative");
    const int N = (n - 1) / 2;
    const int order = N + k;
    if (order > 8) throw std::invalid_argument("phi: total derivative order exceeds 8");
    const double sign = (N % 2 == 0) ? 1.0 : -1.0;
    return sign * ((n % 2 == 0) ? psi0(order, X) : psi1(order, X, cfg));
}

double asymptotic_leading(int n, int k, double X, Regime regime) {
    if (!(X > 1)) throw std::domain_error("asymptotic_leading: X must exceed 1");
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double p = k + 0.5 * n;
    const double gamma = std::tgamma(p);
    if (regime == Regime::infinity_tail)
        return sign * gamma * std::exp(-p * std::log(X)) / std::log(X);
    return sign * gamma / (2.0 * std::pow(X - 1.0, p));
}

double local_remainder_exponent(int n, int k) { return (n == 1 && k == 0) ? 0.5 : 1.0; }

// ---------------------------------------------------------------------------
// Heat kernel
// ---------------------------------------------------------------------------

namespace {

// (-(1/sinh x) d/dx)^M applied to the 1-D heat kernel, evaluable on nested
// dual arguments of any remaining depth.
template <int M, class T>
T heat_iter(const T& x, double t) {
    if constexpr (M == 0) {
        return std::pow(4.0 * kPi * t, -0.5) * exp(-(x * x) * (1.0 / (4.0 * t)));
    } else {
        Dual<T> lifted{x, T{} + 1.0};
        const Dual<T> g = heat_iter<M - 1>(lifted, t);
        return -g.d / sinh(x);
    }
}

template <class T>
T heat_even_dispatch(int half, const T& x, double t) {
    switch (half) {
        case 1: return heat_iter<1>(x, t);
        case 2: return heat_iter<2>(x, t);
        case 3: return heat_iter<3>(x, t);
        default: throw std::invalid_argument("heat kernel: n supported in 1..6");
    }
}

double heat_odd_order(int m, double x, double t) {
    switch (m) {
        case 1: return heat_iter<1>(x, t);
        case 2: return heat_iter<2>(x, t);
        case 3: return heat_iter<3>(x, t);
        default: throw std::invalid_argument("heat kernel: n supported in 1..6");
    }
}

}  // namespace

double heat_kernel_radial(int n, double t, double R, const QuadratureConfig& cfg) {
    cfg.validate();
    if (n < 1 || n > 6) throw std::invalid_argument("heat_kernel_radial: n supported in 1..6");
    if (!(t > 0)) throw std::domain_error("heat_kernel_radial: t must be positive");
    if (!(R >= 0)) throw std::domain_error("heat_kernel_radial: R must be nonnegative");
    const double x0 = std::max(R, 1e-8);

    if (n % 2 == 0) {
        return std::pow(2.0 * kPi, -0.5 * n) * heat_even_dispatch(n / 2, x0, t);
    }

    // Odd n: singular integral, split at x = R + 1. The head uses the exact
    // substitution cosh x - cosh R = w^2 (integrand becomes 2 G(x(w))); the
    // tail integrates in x with geometric panels.
    const int m = (n + 1) / 2;
    const double coshR = std::cosh(x0);
    const double coshRm1 = 2.0 * std::pow(std::sinh(0.5 * x0), 2);
    auto x_of_w = [&](double w) { return stable_arccosh1p(coshRm1 + w * w); };
    auto head_f = [&](double w) { return 2.0 * heat_odd_order(m, x_of_w(w), t); };
    const double w_split = std::sqrt(std::cosh(x0 + 1.0) - coshR);
    const double head = integrate(head_f, 0.0, w_split, std::max(4, cfg.panels / 4),
                                  cfg.nodes_per_panel);
    // The density sinh x (cosh x - cosh R)^{-1/2} ~ e^{x/2} while the iterated
    // Gaussian factor carries e^{-x}, so the tail lives on x = O(10..100) for
    // every t; beyond 700 everything is below 1e-150 and cosh would overflow.
    auto tail_f = [&](double x) {
        if (x > 700.0) return 0.0;
        return std::sinh(x) / std::sqrt(std::cosh(x) - coshR) * heat_odd_order(m, x, t);
    };
    const double tail = integrate_tail(tail_f, x0 + 1.0, 0.5, cfg);
    return std::pow(kPi, -0.5) * std::pow(2.0 * kPi, -0.5 * n) * (head + tail);
}

double heat_kernel_point(int n, double t, const GroupPoint& p, const QuadratureConfig& cfg) {
    if (p.n() != n) throw std::invalid_argument("heat_kernel_point: dimension mismatch");
    return std::sqrt(modular(p)) * heat_kernel_radial(n, t, distance(p), cfg);
}

// ---------------------------------------------------------------------------
// L^{-1/2} kernel profile
// ---------------------------------------------------------------------------

double sqrt_inv_kernel(int n, double R, SqrtInvMode mode, const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(R > 0)) throw std::domain_error("sqrt_inv_kernel: R must be positive");
    if (mode == SqrtInvMode::closed_form) {
        const double X = (R < 700.0) ? std::cosh(R) : 1e300;
        return phi(n, 0, std::min(X, 1e300), cfg) / (kPi * std::pow(2.0 * kPi, 0.5 * n));
    }
    // subordination: pi^{-1/2} int h_t(R) t^{-1/2} dt, t = e^s
    auto integrand = [&](double s) {
        return heat_kernel_radial(n, std::exp(s), R, cfg) * std::exp(0.5 * s);
    };
    const double s_lo = 2.0 * std::log(std::min(R, 1.0)) - 30.0;
    const double head = integrate(integrand, s_lo, 0.0, static_cast<int>(-s_lo) + 1,
                                  cfg.nodes_per_panel);
    const double tail = integrate_tail(integrand, 0.0, 1.0, cfg, 200);
    return (head + tail) / std::sqrt(kPi);
}

// ---------------------------------------------------------------------------
// Radial table + grid sampling
// ---------------------------------------------------------------------------

double RadialTable::operator()(double r) const {
    if (r >= r_max_) return 0.0;
    const int count = static_cast<int>(vals_.size());
    const double h = r_max_ / (count - 1);
    const double t = r / h;
    int i = static_cast<int>(std::floor(t));
    if (i < 0) i = 0;
    if (i > count - 2) i = count - 2;
    const double s = t - i;
    // Catmull-Rom slopes from neighbouring samples.
    const double y0 = vals_[i], y1 = vals_[i + 1];
    const double m0 = (i > 0) ? 0.5 * (vals_[i + 1] - vals_[i - 1]) : (vals_[1] - vals_[0]);
    const double m1 = (i + 2 < count) ? 0.5 * (vals_[i + 2] - vals_[i]) : (y1 - y0);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * m1;
}

SampledFunction sample_heat_kernel(const GridSpec& grid, int n, double t,
                                   const QuadratureConfig& cfg) {
    if (grid.n() != n) throw std::invalid_argument("sample_heat_kernel: dimension mismatch");
    // Largest distance reachable on the grid.
    double xsq = 0.0;
    for (const auto& ax : grid.x) xsq += std::max(ax.min * ax.min, ax.max * ax.max);
    const double umax = std::max(std::abs(grid.u.min), std::abs(grid.u.max));
    GroupPoint far(std::vector<double>(n, 0.0), umax);
    for (int a = 0; a < n; ++a) far.x[a] = std::sqrt(xsq / n);
    far.u = -umax;
    const double r_max = distance(far) + 1.0;
    RadialTable table([&](double r) { return heat_kernel_radial(n, t, r, cfg); }, r_max,
                      std::max(512, static_cast<int>(r_max * 200)));
    SampledFunction f(grid);
    f.fill([&](const double* x, double u) {
        GroupPoint p(std::vector<double>(x, x + n), u);
        return std::sqrt(modular(p)) * table(distance(p));
    });
    return f;
}

ProfileEvaluator::ProfileEvaluator(int dim, QuadratureConfig q, int dmax)
    : n(dim), quad(q), derivative_max(dmax) {
    if (n < 1 || n > 6) throw std::invalid_argument("ProfileEvaluator: n in 1..6");
    if (derivative_max < 0 || derivative_max > 4)
        throw std::invalid_argument("ProfileEvaluator: derivative_max in 0..4");
    quad.validate();
}

double ProfileEvaluator::psi0(int k, double X) const {
    if (k > derivative_max) throw std::invalid_argument("psi0: k exceeds derivative_max");
    return axb::psi0(k, X);
}

double ProfileEvaluator::psi1(int k, double X) const {
    if (k > derivative_max) throw std::invalid_argument("psi1: k exceeds derivative_max");
    return axb::psi1(k, X, quad);
}

double ProfileEvaluator::phi(int k, double X) const {
    const int N = (n - 1) / 2;
    if (k + N > derivative_max + 2)
        throw std::invalid_argument("phi: k + N exceeds derivative_max + 2");
    return axb::phi(n, k, X, quad);
}

double ProfileEvaluator::asymptotic_leading(int k, double X, Regime regime) const {
    return axb::asymptotic_leading(n, k, X, regime);
}

}  // namespace axb
