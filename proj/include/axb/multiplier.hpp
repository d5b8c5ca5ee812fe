#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "axb/group.hpp"
#include "axb/riesz.hpp"

namespace axb {

using cplx = std::complex<double>;

/// Gridded Fourier data of r_{alpha,j} = (-1)^{|alpha|} d_x^alpha (x^alpha r_j),
/// alpha in {0,1}^n encoded as a bitmask. The profile is differentiated in
/// closed form and transformed by a discrete Fourier transform on a padded
/// symmetric grid; evaluation interpolates multilinearly on the frequency
/// grid. Arguments beyond half the Nyquist band are refused by at(); the
/// operator-assembly path maps them to zero, which is legitimate only when
/// the band edge exceeds 30 (there the symbol is below 1e-13).
class SymbolFunction {
public:
    SymbolFunction(int n, unsigned alpha_mask, int j);

    int n() const { return n_; }
    int j() const { return j_; }
    unsigned alpha_mask() const { return alpha_; }
    /// Half-Nyquist guard, per axis.
    double band_edge() const { return band_edge_; }

    /// S_{alpha,j}(xi); throws outside the resolved band.
    cplx at(const double* xi) const;
    /// As at(), but zero beyond the band. Requires band_edge() >= 30.
    cplx at_or_zero(const double* xi) const;

    /// Shared registry keyed by (n, alpha, j).
    static const SymbolFunction& cached(int n, unsigned alpha_mask, int j);

private:
    cplx interpolate(const double* xi) const;

    int n_, j_;
    unsigned alpha_;
    int half_;           // per-axis frequency index range [-half_, half_]
    double dxi_;         // frequency spacing
    double band_edge_;
    std::vector<cplx> data_;  // signed-frequency layout, row-major
};

/// Convenience wrapper over the registry.
cplx symbol_S(int n, unsigned alpha_mask, int j, const double* xi);

struct SymbolDecayFit {
    double epsilon = 0.0;  // fitted exponent of min(|xi|, 1/|xi|)
    double constant = 0.0; // smallest C with |S| <= C min(|xi|,1/|xi|)^epsilon on the samples
};

/// Least-squares fit of log|S| against log min(|xi|,1/|xi|) over a log-spaced
/// sweep along the first axis.
SymbolDecayFit fit_symbol_decay(int n, unsigned alpha_mask, int j, double xi_lo, double xi_hi,
                                int count);

/// Discretized integral operator on a uniform u-grid: kernel matrix plus
/// trapezoid quadrature weights. Application is (Mf)_i = sum_j K_ij q_j f_j.
/// Immutable after construction; building verifies all entries are finite.
class IntegralOperator1D {
public:
    template <class F>
    static IntegralOperator1D from_kernel(const GridAxis& axis, F&& k) {
        IntegralOperator1D op(axis);
        for (int i = 0; i < axis.count; ++i)
            for (int j = 0; j < axis.count; ++j) op.kernel_(i, j) = k(axis.at(i), axis.at(j));
        op.check_finite();
        return op;
    }
    static IntegralOperator1D identity(const GridAxis& axis);

    const GridAxis& axis() const { return axis_; }
    const Eigen::MatrixXcd& kernel() const { return kernel_; }
    const Eigen::VectorXd& quad_weights() const { return weights_; }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;

    friend IntegralOperator1D build_multiplier_operator(const KernelId&, const double*, unsigned,
                                                        const GridAxis&);

private:
    explicit IntegralOperator1D(const GridAxis& axis);
    void check_finite() const;

    GridAxis axis_;
    Eigen::MatrixXcd kernel_;
    Eigen::VectorXd weights_;
};

/// H-kernel of M_K(xi) for the main terms at infinity, filled from the
/// closed symbol forms (variants K0, Kj, K0_tilde).
IntegralOperator1D build_multiplier_operator(const KernelId& id, const double* xi,
                                             unsigned alpha_mask, const GridAxis& axis);

/// A2 characteristic estimate: sup over dyadic-aligned grid subintervals of
/// avg(w) avg(1/w). A constant-factor underestimate of the true supremum.
double a2_characteristic(const std::vector<double>& samples);

/// Positive weight sampled on a u-grid together with its A2 estimate.
struct MuckenhouptWeight {
    std::vector<double> samples;
    double a2_estimate = 1.0;

    static MuckenhouptWeight constant(double c, const GridAxis& axis);
    static MuckenhouptWeight power(double a, const GridAxis& axis);  // |u|^a, a in (-1,1)
    static MuckenhouptWeight from_samples(std::vector<double> s);
    MuckenhouptWeight inverted() const;
};

struct PowerIterOptions {
    double rel_tol = 1e-8;
    int max_iters = 20000;
    std::uint64_t seed = 0x5eedULL;
};

/// Discrete L^2(w) -> L^2(w) operator norm: the largest singular value of
/// D^{1/2} K Q D^{-1/2}, D = diag(w . q), Q = diag(q), by power iteration on
/// the Gram operator.
double weighted_opnorm(const IntegralOperator1D& op, const MuckenhouptWeight& w,
                       const PowerIterOptions& opts = {});

enum class ModelKernel { W, Zeps, ZepsStar };

IntegralOperator1D build_model_kernel(ModelKernel kind, double eps, const GridAxis& axis);
double model_kernel_opnorm(ModelKernel kind, double eps, const MuckenhouptWeight& w,
                           const GridAxis& axis, const PowerIterOptions& opts = {});

/// Row/column-sum Schur bound sqrt(sup_u sum_{u'} |K| q . sup_{u'} sum_u |K| q).
double schur_bound_rowcol(const IntegralOperator1D& op);
/// Schur test with weight p: sqrt(C1 C2), C1 = sup_i sum_j |K_ij| p_j q_j / p_i.
double schur_bound_weighted(const IntegralOperator1D& op,
                            const std::function<double(double)>& p);

/// sigma^xi(K) phi by direct quadrature of the representation integral.
Eigen::VectorXcd representation_apply_direct(const SampledFunction& K, const double* xi,
                                             const Eigen::VectorXcd& phi);
/// Same vector via the integral operator with kernel H_K^xi(s,s') =
/// (F K)(e^{s'} xi, s - s'), the partial Fourier transform of K.
Eigen::VectorXcd representation_apply_via_kernel(const SampledFunction& K, const double* xi,
                                                 const Eigen::VectorXcd& phi);

/// Max absolute entry difference between M_K(e^v xi) and tau_{-v} M_K(xi) tau_v
/// on the common interior. v must be an integer multiple of the grid spacing.
double scaling_covariance_check(const KernelId& id, const double* xi, unsigned alpha_mask,
                                const GridAxis& axis, double v);

}  // namespace axb
