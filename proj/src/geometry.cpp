#include "racetrack/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "racetrack/params.hpp"

namespace racetrack {

double circular_distance(double x, double y) {
    if (std::isnan(x) || std::isnan(y)) {
        throw std::invalid_argument("circular_distance: NaN input");
    }
    const double d = std::abs(x - y);
    return std::min(d, two_pi - d);
}

Grid build_grid(int node_count) {
    if (node_count < 4) {
        throw std::invalid_argument("build_grid: node_count must be >= 4");
    }
    if (node_count % 2 != 0) {
        throw std::invalid_argument("build_grid: node_count must be even");
    }
    Grid grid;
    grid.node_count = node_count;
    grid.dx = two_pi / node_count;
    grid.nodes.resize(node_count);
    for (int i = 0; i < node_count; ++i) {
        grid.nodes[i] = -std::numbers::pi + i * grid.dx;
    }
    return grid;
}

double integrate(const Grid& grid, std::span<const double> values) {
    if (static_cast<int>(values.size()) != grid.node_count) {
        throw std::invalid_argument("integrate: field length does not match grid");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return grid.dx * sum;
}

Kernel::Kernel(int size, double alpha, std::vector<double> data)
    : size_(size), alpha_(alpha), data_(std::move(data)), first_(size) {
    for (int j = 0; j < size_; ++j) first_[j] = data_[j];
}

namespace {

// Circulant product over a tile of outputs: out[t+l] = sum_o f[o]*in[t+l+o].
// Each output is one scalar accumulation chain in ascending offset order, so
// the result is bit-identical for any tile width and exactly equivariant
// under rotation of the input. Vectorization runs across the tile.
template <int Tile>
void apply_tile(const double* f, const double* ext, double* out, int n, int t) {
    double acc[Tile] = {};
    for (int o = 0; o < n; ++o) {
        const double fo = f[o];
        const double* w = ext + t + o;
        for (int l = 0; l < Tile; ++l) acc[l] += fo * w[l];
    }
    for (int l = 0; l < Tile; ++l) out[t + l] = acc[l];
}

}  // namespace

void Kernel::apply(std::span<const double> in, std::span<double> out) const {
    const int n = size_;
    // doubled input so the offset window of every node is contiguous
    thread_local std::vector<double> ext;
    ext.resize(2 * static_cast<size_t>(n));
    std::copy(in.begin(), in.end(), ext.begin());
    std::copy(in.begin(), in.end(), ext.begin() + n);

    const double* f = first_.data();
    const double* e = ext.data();
    double* o = out.data();
    int t = 0;
    for (; t + 64 <= n; t += 64) apply_tile<64>(f, e, o, n, t);
    for (; t + 8 <= n; t += 8) apply_tile<8>(f, e, o, n, t);
    for (; t + 2 <= n; t += 2) apply_tile<2>(f, e, o, n, t);
}

Kernel build_kernel(const Grid& grid, double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw std::invalid_argument("build_kernel: alpha must be finite and >= 0");
    }
    const int n = grid.node_count;
    // First row from the circular node separation min(j, n-j)*dx; the same
    // expression evaluates for offsets j and n-j, so the row (and with it the
    // whole matrix) is bit-exactly symmetric. Every other row is a rotation of
    // the first, which keeps the circulant structure bit-exact as well.
    std::vector<double> first(n);
    for (int j = 0; j < n; ++j) {
        first[j] = std::exp(-alpha * (grid.dx * std::min(j, n - j)));
    }
    std::vector<double> data(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        double* row = data.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            row[j] = first[(j - i + n) % n];
        }
    }
    return Kernel(n, alpha, std::move(data));
}

}  // namespace racetrack
