#pragma once

#include <string>
#include <vector>

namespace axb {

/// A point (x, u) of the semidirect product R^n x| R, where R acts on R^n by
/// dilations e^u. Carries the ambient dimension n = x.size().
struct GroupPoint {
    std::vector<double> x;
    double u = 0.0;

    GroupPoint() = default;
    GroupPoint(std::vector<double> xv, double uv);
    GroupPoint(double x1, double uv);  // n = 1 convenience

    int n() const { return static_cast<int>(x.size()); }
    double norm_x_sq() const;
};

GroupPoint identity(int n);

/// (x,u) . (x',u') = (x + e^u x', u + u')
GroupPoint multiply(const GroupPoint& p, const GroupPoint& q);

/// (x,u)^{-1} = (-e^{-u} x, -u)
GroupPoint invert(const GroupPoint& p);

/// Riemannian distance to the identity: arccosh(cosh u + e^{-u}|x|^2/2).
double distance(const GroupPoint& p);

/// Modular function m(x,u) = e^{-nu} (density of right vs left Haar measure).
double modular(const GroupPoint& p);

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    double spacing() const { return (max - min) / (count - 1); }
    double at(int i) const { return min + i * spacing(); }
};

/// Uniform tensor grid on R^n x R. Reference measure is Lebesgue dx du
/// (the right Haar measure).
struct GridSpec {
    std::vector<GridAxis> x;
    GridAxis u;

    int n() const { return static_cast<int>(x.size()); }
    long total_nodes() const;
    void validate() const;
    bool operator==(const GridSpec& other) const;
};

GridSpec make_grid(int n, double x_extent, int nx, double u_extent, int nu);

/// Real-valued function sampled on a GridSpec. Storage is row-major with the
/// x axes outermost and u innermost. Off-grid evaluation is multilinear
/// interpolation with zero extension.
class SampledFunction {
public:
    SampledFunction() = default;
    explicit SampledFunction(GridSpec grid);

    const GridSpec& grid() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    long index(const std::vector<int>& ix, int iu) const;
    double& at(const std::vector<int>& ix, int iu) { return values_[index(ix, iu)]; }
    double at(const std::vector<int>& ix, int iu) const { return values_[index(ix, iu)]; }

    /// Multilinear interpolation at (x, u), zero outside the grid.
    double interpolate(const double* x, double u) const;
    double interpolate(const GroupPoint& p) const { return interpolate(p.x.data(), p.u); }

    /// Trapezoid quadrature of the samples against dx du.
    double integral() const;
    /// Same, of |f|.
    double integral_abs() const;
    double max_abs() const;
    /// Largest |f| over boundary nodes (used for decay warnings).
    double boundary_max_abs() const;

    template <class F>
    void fill(F&& f) {
        for_each_node([&](const std::vector<int>& ix, int iu, long flat) {
            std::vector<double> xv(grid_.n());
            for (int a = 0; a < grid_.n(); ++a) xv[a] = grid_.x[a].at(ix[a]);
            values_[flat] = f(xv.data(), grid_.u.at(iu));
        });
    }

    template <class Visit>
    void for_each_node(Visit&& visit) const {
        const int n = grid_.n();
        std::vector<int> ix(n, 0);
        long flat = 0;
        const int nu = grid_.u.count;
        while (true) {
            for (int iu = 0; iu < nu; ++iu, ++flat) visit(ix, iu, flat);
            int a = n - 1;
            while (a >= 0 && ++ix[a] == grid_.x[a].count) ix[a--] = 0;
            if (a < 0) break;
        }
    }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// f^*(x,u) = e^{-nu} f(-e^{-u} x, -u) for real f; an L^1 isometry.
SampledFunction involute(const SampledFunction& f);

enum class ConvMethod { automatic, direct, fft };

/// Group convolution (f * g)(x,u) = int f(x - e^{u-u'} x', u-u') g(x',u') dx' du'
/// by quadrature over g's grid. The fft method resamples the rescaled g-slice
/// onto the difference lattice per (u,u') pair and convolves spectrally; the
/// direct method interpolates f pointwise. Both require matching grids.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g,
                         ConvMethod method = ConvMethod::automatic);

/// CSV serialization: one-line JSON header describing the grid, then a
/// header row x1..xn,u,value and one row per node.
void save_csv(const SampledFunction& f, const std::string& path);
SampledFunction load_csv(const std::string& path);

}  // namespace axb
