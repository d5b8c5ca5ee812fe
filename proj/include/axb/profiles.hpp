#pragma once

#include <vector>

#include "axb/group.hpp"
#include "axb/quadrature.hpp"

namespace axb {

enum class LegendreRoute { compact, cosh_integral };
enum class Regime { infinity_tail, local };
enum class SqrtInvMode { closed_form, subordination };

/// Legendre function of the second kind Q^0_{lambda-1/2}(z), lambda > 0,
/// z > 1. Two independent integral representations; `compact` is primary.
double legendre_q(double lambda, double z, const QuadratureConfig& cfg = {},
                  LegendreRoute route = LegendreRoute::compact);

/// k-th derivative of Psi_0(X) = 1 / (sqrt(X^2-1) log(X + sqrt(X^2-1))),
/// X > 1, by forward-mode automatic differentiation of the closed form.
/// Large X switches to the factored form (X log X)^{-1} G(1/X, 1/log X);
/// X is capped at 1e300.
double psi0(int k, double X);

/// k-th derivative of Psi_1(X) = pi^{-1/2} int_{arccosh X}^inf
/// (cosh x - X)^{-1/2} dx/x, via the single s-integral over (-1,1) with the
/// endpoint substitution s = +-(1 - w^2).
double psi1(int k, double X, const QuadratureConfig& cfg = {});

/// Coefficients c_l^k of prod_{i=0}^{k-1}(lambda + 1/2 + i) = sum c_l^k lambda^l.
/// Dyadic rationals, exact in double. c_0^k = pi^{-1/2} Gamma(k+1/2).
std::vector<double> falling_product_coeffs(int k);

/// Phi_n^{(k)}(X) where Phi_n = (-1)^N Psi_j^{(N)}, N = floor((n-1)/2),
/// j = n mod 2. Supported: n in 1..6, k + N <= 8.
double phi(int n, int k, double X, const QuadratureConfig& cfg = {});

/// Leading asymptotic term of Phi_n^{(k)}:
///   infinity: (-1)^k Gamma(k+n/2) / (X^{k+n/2} log X)
///   local:    (-1)^k Gamma(k+n/2) / (2 (X-1)^{k+n/2})
double asymptotic_leading(int n, int k, double X, Regime regime);

/// Holder exponent delta of the local remainder: 1/2 when n=1 and k=0,
/// else 1.
double local_remainder_exponent(int n, int k);

/// Radial heat profile (m^{-1/2} h_t)(R), R > 0, t > 0. Even n uses the
/// iterated (-(1/sinh R) d/dR)^{n/2} of the 1-D Gaussian via automatic
/// differentiation; odd n evaluates the singular integral with the
/// cosh x - cosh R = w^2 substitution.
double heat_kernel_radial(int n, double t, double R, const QuadratureConfig& cfg = {});

/// Heat kernel h_t at a group point: m^{1/2}(p) * heat_kernel_radial(d(p)).
double heat_kernel_point(int n, double t, const GroupPoint& p, const QuadratureConfig& cfg = {});

/// Radial profile of the L^{-1/2} kernel, (m^{-1/2} k)(R).
/// closed_form: pi^{-1} (2 pi)^{-n/2} Phi_n(cosh R);
/// subordination: pi^{-1/2} int_0^inf heat_kernel_radial(t) t^{-1/2} dt.
double sqrt_inv_kernel(int n, double R, SqrtInvMode mode, const QuadratureConfig& cfg = {});

/// Cubic-Hermite table of a smooth radial profile on [0, r_max]; zero beyond.
/// Makes grid sampling of heat/fractional-power kernels cheap.
class RadialTable {
public:
    template <class F>
    RadialTable(F&& f, double r_max, int count) : r_max_(r_max), vals_(count) {
        const double h = r_max / (count - 1);
        for (int i = 0; i < count; ++i) vals_[i] = f(std::max(1e-8, i * h));
    }
    double operator()(double r) const;
    double r_max() const { return r_max_; }

private:
    double r_max_;
    std::vector<double> vals_;
};

/// Sample h_t on a grid through a radial table.
SampledFunction sample_heat_kernel(const GridSpec& grid, int n, double t,
                                   const QuadratureConfig& cfg = {});

/// Configured evaluator bundling dimension, quadrature settings, and the
/// maximum derivative order.
struct ProfileEvaluator {
    int n = 1;
    QuadratureConfig quad{};
    int derivative_max = 4;

    ProfileEvaluator(int dim = 1, QuadratureConfig q = {}, int dmax = 4);

    double psi0(int k, double X) const;
    double psi1(int k, double X) const;
    double phi(int k, double X) const;
    double asymptotic_leading(int k, double X, Regime regime) const;
    double heat_kernel(double t, double R) const { return heat_kernel_radial(n, t, R, quad); }
    double sqrt_inv(double R, SqrtInvMode mode) const { return sqrt_inv_kernel(n, R, mode, quad); }
};

}  // namespace axb
