#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "axb/group.hpp"

namespace axb {

/// Dirichlet discretization window for H = -d^2/ds^2 + xi^2 e^{2s}. The grid
/// points are the interior degrees of freedom; homogeneous values are imposed
/// one spacing outside both ends. xi = 0 is allowed as the free limit.
struct SchrodingerGrid {
    GridAxis s;
    double xi = 1.0;

    void validate() const;
};

/// H = D^T D / h^2 + diag(V) with D the forward-difference matrix, so H is
/// symmetric positive definite; carries its eigendecomposition.
class SchrodingerOperator {
public:
    explicit SchrodingerOperator(const SchrodingerGrid& grid);

    const SchrodingerGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& H() const { return H_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Eigen::MatrixXd& eigenvectors() const { return evecs_; }
    Eigen::VectorXd potential() const;

    /// H^{-1/2} f via spectral calculus.
    Eigen::VectorXd inv_sqrt_apply(const Eigen::VectorXd& f) const;

private:
    SchrodingerGrid grid_;
    Eigen::MatrixXd H_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;
};

SchrodingerOperator build_H(const SchrodingerGrid& grid);

/// The two first-order Riesz transforms: deriv = D H^{-1/2} / h (maps to the
/// ns+1 staggered differences) and pot = diag(V^{1/2}) H^{-1/2}.
struct RieszOperators {
    Eigen::MatrixXd deriv;  // (ns+1) x ns
    Eigen::MatrixXd pot;    // ns x ns
};

RieszOperators riesz_operators(const SchrodingerOperator& H);

/// Grid-independent probe functions: signed Gaussian bumps, narrow (spike)
/// or wide, at seeded centers/widths inside [lo, hi].
struct Probe {
    double center, width, sign;
};
std::vector<Probe> make_probe_family(int trials, std::uint64_t seed, double lo, double hi);

/// Lower bound on ||op||_{p->p}: max over the family of ||op f||_p / ||f||_p
/// with h^{1/p}-weighted discrete norms. Deterministic given the family.
double lp_norm_probe(const Eigen::MatrixXd& op, const GridAxis& axis, double p,
                     const std::vector<Probe>& family);

}  // namespace axb
