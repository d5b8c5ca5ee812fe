#include "axb/schrodinger.hpp"

#include <cmath>
#include <stdexcept>

#include "axb/common.hpp"

namespace axb {

void SchrodingerGrid::validate() const {
    if (s.count < 16) throw std::invalid_argument("SchrodingerGrid: ns >= 16");
    if (!(s.max > s.min)) throw std::invalid_argument("SchrodingerGrid: empty window");
    if (s.count > 4096) throw std::invalid_argument("SchrodingerGrid: ns capped at 4096");
    const double vmax = xi * xi * std::exp(2.0 * s.max);
    if (!(vmax <= 1e12))
        throw std::invalid_argument("SchrodingerGrid: potential overflow, xi^2 e^{2 s_max} > 1e12");
}

SchrodingerOperator::SchrodingerOperator(const SchrodingerGrid& grid) : grid_(grid) {
    grid.validate();
    const int m = grid.s.count;
    const double h = grid.s.spacing();
    H_.setZero(m, m);
    // D^T D = tridiag(-1, 2, -1) under Dirichlet conditions
    for (int i = 0; i < m; ++i) {
        H_(i, i) = 2.0 / (h * h) + grid.xi * grid.xi * std::exp(2.0 * grid.s.at(i));
        if (i > 0) H_(i, i - 1) = -1.0 / (h * h);
        if (i + 1 < m) H_(i, i + 1) = -1.0 / (h * h);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H_);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("SchrodingerOperator: eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
    if (evals_[0] <= 0.0)
        throw std::runtime_error("SchrodingerOperator: operator is not positive definite");
    if (evals_[m - 1] / evals_[0] > 1e14)
        throw std::runtime_error("SchrodingerOperator: condition number above 1e14");
}

Eigen::VectorXd SchrodingerOperator::potential() const {
    const int m = grid_.s.count;
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = grid_.xi * grid_.xi * std::exp(2.0 * grid_.s.at(i));
    return v;
}

Eigen::VectorXd SchrodingerOperator::inv_sqrt_apply(const Eigen::VectorXd& f) const {
    Eigen::VectorXd c = evecs_.transpose() * f;
    for (int i = 0; i < c.size(); ++i) c[i] /= std::sqrt(evals_[i]);
    return evecs_ * c;
}

SchrodingerOperator build_H(const SchrodingerGrid& grid) { return SchrodingerOperator(grid); }

RieszOperators riesz_operators(const SchrodingerOperator& op) {
    const int m = op.grid().s.count;
    const double h = op.grid().s.spacing();

    Eigen::MatrixXd inv_sqrt = op.eigenvectors();
    for (int k = 0; k < m; ++k) inv_sqrt.col(k) /= std::sqrt(op.eigenvalues()[k]);
    inv_sqrt = inv_sqrt * op.eigenvectors().transpose();

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m + 1, m);
    for (int i = 0; i < m; ++i) {
        D(i, i) = 1.0;       // g_i - g_{i-1} with g_{-1} = 0
        D(i + 1, i) = -1.0;  // contributes -g_{m-1} at the top row
    }

    RieszOperators out;
    out.deriv = (D * inv_sqrt) / h;
    const Eigen::VectorXd v = op.potential();
    out.pot = v.cwiseSqrt().asDiagonal() * inv_sqrt;
    return out;
}

std::vector<Probe> make_probe_family(int trials, std::uint64_t seed, double lo, double hi) {
    if (trials < 1) throw std::invalid_argument("make_probe_family: trials >= 1");
    Rng rng(seed);
    std::vector<Probe> out(trials);
    for (int i = 0; i < trials; ++i) {
        const bool spike = (i % 2 == 0);
        out[i].center = rng.uniform(lo, hi);
        out[i].width = spike ? rng.uniform(0.1, 0.3) : rng.uniform(0.5, 2.0);
        out[i].sign = rng.sign();
    }
    return out;
}

namespace {

double lp_norm(const Eigen::VectorXd& v, double h, double p) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
    return std::pow(h * s, 1.0 / p);
}

}  // namespace

double lp_norm_probe(const Eigen::MatrixXd& op, const GridAxis& axis, double p,
                     const std::vector<Probe>& family) {
    if (!(p > 1.0)) throw std::invalid_argument("lp_norm_probe: p must exceed 1");
    if (op.cols() != axis.count) throw std::invalid_argument("lp_norm_probe: grid mismatch");
    const double h = axis.spacing();
    double best = 0.0;
    for (const auto& probe : family) {
        Eigen::VectorXd f(axis.count);
        for (int i = 0; i < axis.count; ++i) {
            const double t = (axis.at(i) - probe.center) / probe.width;
            f[i] = probe.sign * std::exp(-t * t);
        }
        const double nf = lp_norm(f, h, p);
        if (nf == 0.0) continue;
        best = std::max(best, lp_norm(op * f, h, p) / nf);
    }
    return best;
}

}  // namespace axb
