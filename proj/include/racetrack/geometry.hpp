#ifndef RACETRACK_GEOMETRY_HPP
#define RACETRACK_GEOMETRY_HPP

#include <span>
#include <vector>

namespace racetrack {

/// A real-valued function sampled on the grid nodes.
using Field = std::vector<double>;

/// Uniform grid on the circle [-pi, pi), nodes x_i = -pi + (i-1)*dx.
struct Grid {
    int node_count = 0;
    double dx = 0.0;
    std::vector<double> nodes;
};

/// Shorter arc distance between two angles in [-pi, pi). Result in [0, pi].
double circular_distance(double x, double y);

/// I must be even and >= 4 so every node's antipode is also a node.
Grid build_grid(int node_count);

/// Periodic trapezoidal rule: dx * sum(values). On a uniform periodic grid
/// all trapezoid weights coincide.
double integrate(const Grid& grid, std::span<const double> values);

/// Symmetric circulant matrix K[i][j] = exp(-alpha * d(x_i, x_j)),
/// stored dense row-major.
class Kernel {
public:
    Kernel() = default;
    Kernel(int size, double alpha, std::vector<double> data);

    int size() const { return size_; }
    double alpha() const { return alpha_; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * size_ + j]; }
    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * size_; }

    /// out = K * in, the direct O(I^2) product. The sum for node i runs over
    /// circular offsets in a fixed order, so rotating the input rotates the
    /// output bit-exactly.
    void apply(std::span<const double> in, std::span<double> out) const;

private:
    int size_ = 0;
    double alpha_ = 0.0;
    std::vector<double> data_;   // dense I x I, row-major
    std::vector<double> first_;  // generating row K[0][*]
};

Kernel build_kernel(const Grid& grid, double alpha);

}  // namespace racetrack

#endif
