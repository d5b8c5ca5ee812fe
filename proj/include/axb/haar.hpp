#pragma once

#include <functional>
#include <map>
#include <vector>

#include "axb/group.hpp"
#include "axb/quadrature.hpp"

namespace axb {

/// Tiling of R by half-open intervals [offset + k*scale, offset + (k+1)*scale).
struct HaarPartition {
    double scale = 1.0;
    double offset = 0.0;

    long index_of(double t) const;
    double left(long k) const { return offset + k * scale; }
    /// L^1-normalized two-step Haar bump on interval k:
    /// psi_I = |I|^{-1} (chi_{I^-} - chi_{I^+}).
    double psi(long k, double t) const;
};

/// Finite combination sum a_I psi_I over one partition. ||.||_1 = sum |a_I|.
class HaarLikeFunction {
public:
    HaarLikeFunction(HaarPartition part, std::map<long, double> coeffs);

    const HaarPartition& partition() const { return part_; }
    const std::map<long, double>& coeffs() const { return coeffs_; }
    double eval(double t) const;
    double l1_norm() const;
    /// Interval endpoints and midpoints over the support, sorted.
    std::vector<double> breakpoints() const;

private:
    HaarPartition part_;
    std::map<long, double> coeffs_;
};

/// Nested shifted dyadic family: D_{mk} has length 2^{-m} and the partitions
/// at scale 2^s carry the alternating thirds offset (2/3 for s even, 1/3 for
/// s odd), which keeps the origin strictly inside one half of its interval at
/// every scale. Envelope kappa(m,k) = C 2^{eps m} (1 + 2^m + |k|)^{-2-eps}.
struct DyadicFamily {
    double epsilon = 0.5;
    double C = 1.0;

    struct Interval {
        double lo, hi;
        double mid() const { return 0.5 * (lo + hi); }
    };
    Interval interval(int m, long k) const;
    double psi(int m, long k, double t) const;
    double kappa(int m, long k) const;
    /// Partial sum over shells |m| <= M of ((1 + log_+ |I|)^N kappa)^delta;
    /// the k-sums carry an integral tail completion.
    double kappa_partial_sum(double delta, int N, int M) const;
};

/// c_I(rho) = |I| int psi_I rho = int_{I^-} rho - int_{I^+} rho.
double haar_coefficient(const std::function<double(double)>& rho, double lo, double hi,
                        int nodes = 16);

/// All coefficients with |m| <= M whose interval meets [-window, window].
std::map<std::pair<int, long>, double> haar_coefficients(
    const std::function<double(double)>& rho, const DyadicFamily& family, int M, double window,
    int nodes = 16);

/// Value/measure pairs of a sampled function; the weak quasi-norm quotient
/// is evaluated against them.
struct WeightedSamples {
    std::vector<double> value;
    std::vector<double> measure;
};

/// sup over a 60-point log-spaced alpha grid of alpha |{|g| > alpha}| / norm1.
double weak_ratio(const WeightedSamples& g, double norm1);

/// S(t,k) = sum_{h >= k+1} Delta_h(t) / (h-k) for finitely many Haar-like
/// levels, Delta_h at scale beta 2^h. Piecewise constant in t; evaluation is
/// exact. The weak quasi-norm over R x Z sums k down to -infinity, the far
/// tail through the 1/(h-k) asymptote of each piece.
class KeySum {
public:
    KeySum(const std::map<int, HaarLikeFunction>& levels, double beta);

    double eval(double t, long k) const;
    double total_l1() const;
    /// sup_alpha alpha |{|S| > alpha}| / norm1 with Lebesgue x counting measure.
    double weak_sup(double norm1, int k_direct = 256) const;

private:
    struct Piece {
        double measure;
        std::vector<double> level_values;  // aligned with heights_
    };
    std::map<int, HaarLikeFunction> levels_;
    std::vector<int> heights_;
    std::vector<Piece> pieces_;
    double total_l1_ = 0.0;
};

/// Discrete flow operator on R^n x Z:
///   T_j f(., k) = sum_{h >= k+1} (h-k)^{-1} int_0^1 f(., h+s) *_x (r_j)_{(2^{h+s})} ds,
/// s-integral by 8-node Gauss-Legendre, x-convolutions spectral.
struct DiscreteTResult {
    std::vector<GridAxis> x_axes;
    int k_min = 0;
    std::vector<std::vector<double>> slices;  // slices[k - k_min][x-flat]

    WeightedSamples samples() const;
};
DiscreteTResult discrete_T(int j, const SampledFunction& f, int k_min, int k_max);

}  // namespace axb
