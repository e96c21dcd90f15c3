#pragma once

#include <cstddef>
#include <vector>

namespace dlmo {

using Vec = std::vector<double>;

// Row-major dense matrix. Storage is contiguous so rows can be handed to
// the kernels directly.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }

    double* data() { return a.data(); }
    const double* data() const { return a.data(); }
    std::size_t size() const { return a.size(); }

    void fill(double v) { a.assign(a.size(), v); }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace dlmo
