#pragma once

#include <functional>
#include <vector>

#include "axb/group.hpp"
#include "axb/profiles.hpp"
#include "axb/quadrature.hpp"

namespace axb {

enum class KernelVariant {
    R,                // k_{R_j}, j >= 1
    Rstar,            // k_{R_j^*}, j >= 1
    R0_minus_R0star,  // antisymmetric j = 0 combination
    R0_plus_R0star,   // symmetric j = 0 combination
    K0_tilde,         // main term r_0(x) chi_{|u|>=1}/u
    K0,               // [(r_0)_{(e^u)} - r_0](x) chi_{u>=1}/u
    Kj,               // r_j(x) chi_{u<=-1}/u, j >= 1
    Kj0_local         // Euclidean main term K_j^0
};

/// Which kernel: dimension, direction index, variant. Variants carrying a 0
/// subscript require j = 0; R/Rstar/Kj require 1 <= j <= n.
struct KernelId {
    int n = 1;
    int j = 0;
    KernelVariant variant = KernelVariant::R;

    void validate() const;
};

/// r_0(x) = (1+|x|^2)^{-1-n/2} and r_j(x) = x_j r_0(x).
double profile_r0(int n, const double* x);
double profile_rj(int n, int j, const double* x);
/// F_{(lambda)}(x) = lambda^{-n} F(x/lambda) applied to r_0 / r_j.
double profile_r0_scaled(int n, double lambda, const double* x);
double profile_rj_scaled(int n, int j, double lambda, const double* x);

/// Pointwise Riesz-transform kernels (variants R, Rstar, R0_minus_R0star,
/// R0_plus_R0star). Throws at the identity.
double riesz_kernel(const KernelId& id, const GroupPoint& p, const QuadratureConfig& cfg = {});

/// Euclidean main term K_j^0(x,u) = (u^2+|x|^2)^{-(n+2)/2} (u or x_j);
/// homogeneous of degree -(n+1).
double local_main_term(int n, int j, const GroupPoint& p);

/// Main terms at infinity (variants K0_tilde, K0, Kj); identically zero off
/// the indicator supports.
double infinity_main_term(const KernelId& id, const GroupPoint& p);

enum class RadialWeight { x, x_restu, u, u_restu };

struct WeightedIntegralResult {
    double lhs = 0.0;  // the G-side integral, via the radial-density reduction
    double rhs = 0.0;  // the matching 1-D bound side
};

/// Both sides of the radial weighted-integral comparison for a nonnegative
/// radial profile f. The caller certifies f(r) <= C e^{-(2+n) r}.
WeightedIntegralResult radial_weighted_integral(const std::function<double(double)>& f,
                                                RadialWeight weight, int n,
                                                const QuadratureConfig& cfg = {});

/// Signed remainder q(p): kernel minus its main terms at infinity, paired as
///   j >= 1:  k_{R_j^*} + 2 Gamma(1+n/2) pi^{-1-n/2} K_j
///   j == 0:  k_{R_0-R_0^*} + 2 Gamma(1+n/2) pi^{-1-n/2} (K~_0 + K_0)
/// The Phi' profile is read from a radial table covering R <= r_max.
class InfinityRemainder {
public:
    InfinityRemainder(int n, int j, double r_max, const QuadratureConfig& cfg = {});
    double operator()(const GroupPoint& p) const;
    int n() const { return n_; }
    int j() const { return j_; }

private:
    int n_, j_;
    RadialTable phi0_table_;
    RadialTable phi1_table_;
};

/// Integral of |q| over {1 <= |u|, R <= U}, reduced to a (rho, u) quadrature
/// by the x-radiality of every term.
double remainder_integrability_check(int n, int j, double U, const QuadratureConfig& cfg = {});

/// Hardy-divergence experiment masses M(U) = int_{U_j x [-U,-2]} |a_v * K|
/// for each U in the sweep; the x_j-window is truncated at 100 + max(sweep)
/// uniformly so that the growth in U is carried by the u-integral alone.
std::vector<double> hardy_divergence_sweep(int n, int j, const std::vector<double>& U_values,
                                           const QuadratureConfig& cfg = {});
double hardy_divergence(int n, int j, double U, const QuadratureConfig& cfg = {});

}  // namespace axb
