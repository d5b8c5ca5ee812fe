#include "axb/riesz.hpp"

#include <cmath>
#include <stdexcept>

#include "axb/common.hpp"

namespace axb {

namespace {

bool has_zero_subscript(KernelVariant v) {
    return v == KernelVariant::R0_minus_R0star || v == KernelVariant::R0_plus_R0star ||
           v == KernelVariant::K0_tilde || v == KernelVariant::K0;
}

double gamma_factor(int n) { return std::tgamma(1.0 + 0.5 * n) / std::pow(kPi, 1.0 + 0.5 * n); }

// cosh R - 1 at (x,u), free of cancellation near the identity.
double coshR_minus_1(const GroupPoint& p) {
    const double sh = std::sinh(0.5 * p.u);
    return 2.0 * sh * sh + std::exp(-p.u) * p.norm_x_sq() / 2.0;
}

}  // namespace

void KernelId::validate() const {
    if (n < 1 || n > 6) throw std::invalid_argument("KernelId: n supported in 1..6");
    if (has_zero_subscript(variant)) {
        if (j != 0) throw std::invalid_argument("KernelId: variant carries subscript 0, need j = 0");
    } else if (variant == KernelVariant::Kj0_local) {
        if (j < 0 || j > n) throw std::invalid_argument("KernelId: j out of range");
    } else {
        if (j < 1 || j > n) throw std::invalid_argument("KernelId: variant needs 1 <= j <= n");
    }
}

double profile_r0(int n, const double* x) {
    double q = 0.0;
    for (int a = 0; a < n; ++a) q += x[a] * x[a];
    return std::pow(1.0 + q, -1.0 - 0.5 * n);
}

double profile_rj(int n, int j, const double* x) { return x[j - 1] * profile_r0(n, x); }

double profile_r0_scaled(int n, double lambda, const double* x) {
    double y[6];
    for (int a = 0; a < n; ++a) y[a] = x[a] / lambda;
    return std::pow(lambda, -n) * profile_r0(n, y);
}

double profile_rj_scaled(int n, int j, double lambda, const double* x) {
    double y[6];
    for (int a = 0; a < n; ++a) y[a] = x[a] / lambda;
    return std::pow(lambda, -n) * profile_rj(n, j, y);
}

double riesz_kernel(const KernelId& id, const GroupPoint& p, const QuadratureConfig& cfg) {
    id.validate();
    if (p.n() != id.n) throw std::invalid_argument("riesz_kernel: dimension mismatch");
    const double Xm1 = coshR_minus_1(p);
    if (Xm1 <= 0.0) throw std::domain_error("riesz_kernel: evaluation at the identity");
    const double X = 1.0 + Xm1;
    const double common = std::sqrt(modular(p)) / (kPi * std::pow(2.0 * kPi, 0.5 * id.n));

    switch (id.variant) {
        case KernelVariant::R:
            return p.x[id.j - 1] * common * phi(id.n, 1, X, cfg);
        case KernelVariant::Rstar:
            return -std::exp(-p.u) * p.x[id.j - 1] * common * phi(id.n, 1, X, cfg);
        case KernelVariant::R0_minus_R0star:
            return 2.0 * std::sinh(p.u) * common * phi(id.n, 1, X, cfg);
        case KernelVariant::R0_plus_R0star:
            return -common * (id.n * phi(id.n, 0, X, cfg) +
                              std::exp(-p.u) * p.norm_x_sq() * phi(id.n, 1, X, cfg));
        default:
            throw std::invalid_argument("riesz_kernel: variant is not a pointwise Riesz kernel");
    }
}

double local_main_term(int n, int j, const GroupPoint& p) {
    if (p.n() != n) throw std::invalid_argument("local_main_term: dimension mismatch");
    if (j < 0 || j > n) throw std::invalid_argument("local_main_term: j out of range");
    const double q = p.u * p.u + p.norm_x_sq();
    if (q == 0.0) throw std::domain_error("local_main_term: evaluation at the identity");
    const double num = (j == 0) ? p.u : p.x[j - 1];
    return num * std::pow(q, -0.5 * (n + 2));
}

double infinity_main_term(const KernelId& id, const GroupPoint& p) {
    id.validate();
    if (p.n() != id.n) throw std::invalid_argument("infinity_main_term: dimension mismatch");
    switch (id.variant) {
        case KernelVariant::K0_tilde:
            if (std::abs(p.u) < 1.0) return 0.0;
            return profile_r0(id.n, p.x.data()) / p.u;
        case KernelVariant::K0: {
            if (p.u < 1.0) return 0.0;
            const double lambda = std::exp(p.u);
            return (profile_r0_scaled(id.n, lambda, p.x.data()) - profile_r0(id.n, p.x.data())) /
                   p.u;
        }
        case KernelVariant::Kj:
            if (p.u > -1.0) return 0.0;
            return profile_rj(id.n, id.j, p.x.data()) / p.u;
        default:
            throw std::invalid_argument("infinity_main_term: variant is not a main term");
    }
}

// ---------------------------------------------------------------------------
// Radial weighted integrals
// ---------------------------------------------------------------------------

namespace {

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

struct WeightSpec {
    std::function<double(double)> w;  // u-weight
    int N;                            // |x| power
    double rhs_rate;                  // e^{rate * r} on [1, inf)
    double u_cut_lo, u_cut_hi;        // support of w inside [-r, r]
};

WeightSpec weight_spec(RadialWeight weight, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (weight) {
        case RadialWeight::x:
            return {[](double) { return 1.0; }, 1, 1.0 + 0.5 * n, -inf, inf};
        case RadialWeight::x_restu:
            return {[](double) { return 1.0; }, 1, 0.5 + 0.5 * n, -inf, 1.0};
        case RadialWeight::u:
            return {[](double u) { return std::abs(std::sinh(u)); }, 0, 1.0 + 0.5 * n, -inf, inf};
        case RadialWeight::u_restu:
            return {[](double u) { return std::abs(u); }, 0, 0.5 * n, -1.0, 1.0};
    }
    throw std::invalid_argument("radial_weighted_integral: unknown weight");
}

// inner(r) = int over u in [-r,r] (clipped to the weight support) of
// w(u) e^{Nu/2} (cosh r - cosh u)^{(n+N)/2-1} du. Endpoints touching +-r are
// mapped by u = +-(r - v^2), which removes the inverse-square-root behaviour
// when (n+N)/2 - 1 = -1/2.
double radial_density(double r, const WeightSpec& ws, int n, const QuadratureConfig& cfg) {
    const double expo = 0.5 * (n + ws.N) - 1.0;
    // cosh r - cosh u = 2 sinh((r+u)/2) sinh((r-u)/2); the product form stays
    // accurate when u approaches +-r
    auto with_gap = [&](double u, double r_minus_u) {
        const double diff = 2.0 * std::sinh(0.5 * (r + u)) * std::sinh(0.5 * r_minus_u);
        return ws.w(u) * std::exp(0.5 * ws.N * u) * std::pow(diff, expo);
    };
    auto plain = [&](double u) { return with_gap(u, r - u); };
    const double lo = std::max(-r, ws.u_cut_lo);
    const double hi = std::min(r, ws.u_cut_hi);
    if (!(hi > lo)) return 0.0;

    double total = 0.0;
    const int nodes = cfg.nodes_per_panel;
    // substitution windows at endpoints touching +-r; capped at half the
    // interval so they never overlap
    const double window = std::min(1.0, 0.5 * (hi - lo));
    double inner_lo = lo, inner_hi = hi;
    if (hi == r) {
        auto sub = [&](double v) {
            const double gap = v * v;  // r - u, exact
            return 2.0 * v * with_gap(r - gap, gap);
        };
        const double v_hi = std::sqrt(window);
        total += integrate_graded(sub, 0.0, v_hi, true, false, 30, nodes);
        inner_hi = r - window;
    }
    if (lo == -r) {
        auto sub = [&](double v) {
            const double u = -r + v * v;
            // r - u = 2r - v^2; the nearby endpoint is u = -r, where
            // cosh r - cosh u vanishes through sinh((r+u)/2) = sinh(v^2/2)
            const double diff = 2.0 * std::sinh(0.5 * v * v) * std::sinh(r - 0.5 * v * v);
            return 2.0 * v * ws.w(u) * std::exp(0.5 * ws.N * u) * std::pow(diff, expo);
        };
        const double v_hi = std::sqrt(window);
        total += integrate_graded(sub, 0.0, v_hi, true, false, 30, nodes);
        inner_lo = -r + window;
    }
    if (inner_hi > inner_lo) {
        // split at 0 where |u| or |sinh u| has a kink
        if (inner_lo < 0.0 && inner_hi > 0.0) {
            total += integrate(plain, inner_lo, 0.0, 8, nodes);
            total += integrate(plain, 0.0, inner_hi, 8, nodes);
        } else {
            total += integrate(plain, inner_lo, inner_hi, 8, nodes);
        }
    }
    return total;
}

}  // namespace

WeightedIntegralResult radial_weighted_integral(const std::function<double(double)>& f,
                                                RadialWeight weight, int n,
                                                const QuadratureConfig& cfg) {
    cfg.validate();
    if (n < 1 || n > 6) throw std::invalid_argument("radial_weighted_integral: n in 1..6");
    const WeightSpec ws = weight_spec(weight, n);
    const double constant = sphere_area(n) * std::pow(2.0, 0.5 * (n + ws.N) - 1.0);

    WeightedIntegralResult out;
    auto lhs_integrand = [&](double r) {
        const double fr = f(r);
        if (fr == 0.0) return 0.0;
        return fr * std::sinh(r) * radial_density(r, ws, n, cfg);
    };
    out.lhs = constant * (integrate(lhs_integrand, 0.0, 1.0, 8, cfg.nodes_per_panel) +
                          integrate_tail(lhs_integrand, 1.0, 1.0, cfg));

    auto rhs_local = [&](double r) { return f(r) * std::pow(r, n + 1); };
    auto rhs_tail = [&](double r) { return f(r) * std::exp(ws.rhs_rate * r); };
    out.rhs = integrate_graded(rhs_local, 0.0, 1.0, true, false, 30, cfg.nodes_per_panel) +
              integrate_tail(rhs_tail, 1.0, 1.0, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Remainder at infinity
// ---------------------------------------------------------------------------

InfinityRemainder::InfinityRemainder(int n, int j, double r_max, const QuadratureConfig& cfg)
    : n_(n),
      j_(j),
      phi0_table_([&](double r) { return phi(n, 0, std::cosh(std::max(r, 0.5)), cfg); },
                  r_max + 0.5, std::max(1024, static_cast<int>(256 * r_max))),
      phi1_table_([&](double r) { return phi(n, 1, std::cosh(std::max(r, 0.5)), cfg); },
                  r_max + 0.5, std::max(1024, static_cast<int>(256 * r_max))) {
    if (j < 0 || j > n) throw std::invalid_argument("InfinityRemainder: j out of range");
}

double InfinityRemainder::operator()(const GroupPoint& p) const {
    const double R = distance(p);
    if (R < 0.9) throw std::domain_error("InfinityRemainder: table covers R >= 0.9 only");
    const double common = std::sqrt(modular(p)) / (kPi * std::pow(2.0 * kPi, 0.5 * n_));
    const double c = 2.0 * gamma_factor(n_);
    if (j_ >= 1) {
        const double kernel = -std::exp(-p.u) * p.x[j_ - 1] * common * phi1_table_(R);
        return kernel + c * infinity_main_term({n_, j_, KernelVariant::Kj}, p);
    }
    const double kernel = 2.0 * std::sinh(p.u) * common * phi1_table_(R);
    return kernel + c * (infinity_main_term({n_, 0, KernelVariant::K0_tilde}, p) +
                         infinity_main_term({n_, 0, KernelVariant::K0}, p));
}

double remainder_integrability_check(int n, int j, double U, const QuadratureConfig& cfg) {
    cfg.validate();
    if (U < 2.0) throw std::invalid_argument("remainder_integrability_check: U >= 2");
    const InfinityRemainder q(n, j, U, cfg);

    // x-angular reduction: the integrand is radial (j = 0) or x_j times a
    // radial factor (j >= 1). Evaluating q along the x_j axis already carries
    // the |x_j| factor, so the radial measure is rho^{n-1} in both cases and
    // only the angular constant differs: |S^{n-1}| versus int |omega_j| dsigma.
    const double ang = (j == 0) ? sphere_area(n)
                                : 2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n + 1));
    const int rho_pow = n - 1;

    auto inner = [&](double u) {
        const double s = std::cosh(U) - std::cosh(u);
        if (s <= 0.0) return 0.0;
        const double rho_max = std::sqrt(2.0 * std::exp(u) * s);
        GroupPoint p(std::vector<double>(n, 0.0), u);
        auto g = [&](double rho) {
            p.x[std::max(j, 1) - 1] = rho;
            return std::abs(q(p)) * std::pow(rho, rho_pow);
        };
        const double split = std::min(4.0, rho_max);
        double v = integrate(g, 0.0, split, 8, cfg.nodes_per_panel);
        if (rho_max > split)
            v += integrate_graded(g, split, rho_max, true, false, 60, cfg.nodes_per_panel);
        return v;
    };

    auto outer = [&](double sgn) {
        double total = 0.0;
        const int panels = static_cast<int>(std::ceil((U - 1.0) / 0.5));
        for (int p = 0; p < panels; ++p) {
            const double a = 1.0 + (U - 1.0) * p / panels;
            const double b = 1.0 + (U - 1.0) * (p + 1) / panels;
            total += integrate([&](double u) { return inner(sgn * u); }, a, b, 1,
                               cfg.nodes_per_panel);
        }
        return total;
    };
    return ang * (outer(1.0) + outer(-1.0));
}

// ---------------------------------------------------------------------------
// Hardy divergence experiment
// ---------------------------------------------------------------------------

namespace {

// Normalized compactly supported bump exp(-1/(1-|t|^2)) on the unit ball.
double bump_raw(double rsq) { return (rsq < 1.0) ? std::exp(-1.0 / (1.0 - rsq)) : 0.0; }

double bump_mass_1d() {
    static const double mass =
        integrate([](double t) { return bump_raw(t * t); }, -1.0, 1.0, 8, 32);
    return mass;
}

double bump_mass(int n) {
    static double cache[7] = {0};
    if (cache[n] == 0.0) {
        cache[n] = sphere_area(n) * integrate([&](double r) { return bump_raw(r * r) *
                                              std::pow(r, n - 1); }, 0.0, 1.0, 8, 32);
    }
    return cache[n];
}

// a_v * K at (x, u <= -2): inner quadrature over the atom support.
double hardy_field(int n, int j, const double* x, double u, int nodes) {
    const auto& gl = gauss_legendre(nodes);
    const int axis = std::max(j, 1) - 1;
    const double inv_phi_mass = 1.0 / bump_mass(n);
    const double inv_psi_mass = 1.0 / bump_mass_1d();

    double total = 0.0;
    double xp[3], xpv[3];
    // u' in [u-1, u+1]; for u <= -2 the indicator chi_{u' <= -1} is full.
    for (int iu = 0; iu < nodes; ++iu) {
        const double up = u + gl.nodes[iu];
        const double wu = gl.weights[iu];
        const double psi = inv_psi_mass * bump_raw((u - up) * (u - up));
        if (psi == 0.0) continue;
        const double lambda = std::exp(u - up);
        // x' over the box x + [-1,1]^n (phi support)
        const int corners = 1;
        (void)corners;
        double xsum = 0.0;
        std::vector<int> idx(n, 0);
        while (true) {
            double w = 1.0, rsq = 0.0;
            for (int a = 0; a < n; ++a) {
                const double t = gl.nodes[idx[a]];
                xp[a] = x[a] + t;
                w *= gl.weights[idx[a]];
                rsq += t * t;
            }
            const double phi_v = inv_phi_mass * bump_raw(rsq);
            if (phi_v != 0.0) {
                for (int a = 0; a < n; ++a) xpv[a] = xp[a];
                xpv[axis] += 1.0;  // v = e_j (e_1 for j = 0)
                const double delta =
                    (j >= 1)
                        ? profile_rj_scaled(n, j, lambda, xpv) - profile_rj_scaled(n, j, lambda, xp)
                        : profile_r0_scaled(n, lambda, xpv) - profile_r0_scaled(n, lambda, xp);
                xsum += w * phi_v * delta;
            }
            int a = n - 1;
            while (a >= 0 && ++idx[a] == nodes) idx[a--] = 0;
            if (a < 0) break;
        }
        total += wu * psi * xsum / up;
    }
    return total;
}

}  // namespace

std::vector<double> hardy_divergence_sweep(int n, int j, const std::vector<double>& U_values,
                                           const QuadratureConfig& cfg) {
    cfg.validate();
    if (n < 1 || n > 3) throw std::invalid_argument("hardy_divergence: n supported in 1..3");
    if (j < 0 || j > n) throw std::invalid_argument("hardy_divergence: j out of range");
    for (double U : U_values)
        if (U < 4.0) throw std::invalid_argument("hardy_divergence: U >= 4");

    double U_max = 0.0;
    for (double U : U_values) U_max = std::max(U, U_max);
    const double T = 100.0 + U_max;  // fixed x_j window [100, T], both signs
    const int axis = std::max(j, 1) - 1;
    const int nodes = 10;
    const int perp_nodes = 8;
    const auto& gl = gauss_legendre(cfg.nodes_per_panel);

    // |F| integrated over the x-region for fixed u
    auto x_integral = [&](double u) {
        double total = 0.0;
        const int xpanels = static_cast<int>(std::ceil((T - 100.0) / 4.0));
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            for (int p = 0; p < xpanels; ++p) {
                const double a = 100.0 + (T - 100.0) * p / xpanels;
                const double b = 100.0 + (T - 100.0) * (p + 1) / xpanels;
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (int i = 0; i < cfg.nodes_per_panel; ++i) {
                    const double xj = sgn * (mid + half * gl.nodes[i]);
                    double x[3] = {0, 0, 0};
                    x[axis] = xj;
                    double v = 0.0;
                    if (n == 1) {
                        v = std::abs(hardy_field(n, j, x, u, nodes));
                    } else {
                        // perpendicular slab |x_perp| <= 1
                        const auto& glp = gauss_legendre(perp_nodes);
                        const int pa = (axis == 0) ? 1 : 0;
                        for (int q = 0; q < perp_nodes; ++q) {
                            x[pa] = glp.nodes[q];
                            if (n == 2) {
                                v += glp.weights[q] * std::abs(hardy_field(n, j, x, u, nodes));
                            } else {
                                const int pb = 3 - axis - pa;
                                for (int r = 0; r < perp_nodes; ++r) {
                                    x[pb] = glp.nodes[r];
                                    if (x[pa] * x[pa] + x[pb] * x[pb] > 1.0) continue;
                                    v += glp.weights[q] * glp.weights[r] *
                                         std::abs(hardy_field(n, j, x, u, nodes));
                                }
                            }
                        }
                    }
                    total += half * gl.weights[i] * v;
                }
            }
        }
        return total;
    };

    // u-panels accumulated from -2 downward so each M(U) shares quadrature
    // nodes with every other (monotonicity is then structural).
    std::vector<double> sorted = U_values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> partial;  // integral over [-U, -2] at sweep points
    double acc = 0.0, lo = 2.0;
    for (double U : sorted) {
        const int panels = static_cast<int>(std::ceil(U - lo));
        for (int p = 0; p < panels; ++p) {
            const double a = lo + (U - lo) * p / panels;
            const double b = lo + (U - lo) * (p + 1) / panels;
            acc += integrate([&](double t) { return x_integral(-t); }, a, b, 1, 6);
        }
        partial.push_back(acc);
        lo = U;
    }
    std::vector<double> out(U_values.size());
    for (std::size_t i = 0; i < U_values.size(); ++i) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), U_values[i]);
        out[i] = partial[it - sorted.begin()];
    }
    return out;
}

double hardy_divergence(int n, int j, double U, const QuadratureConfig& cfg) {
    return hardy_divergence_sweep(n, j, {U}, cfg)[0];
}

}  // namespace axb
