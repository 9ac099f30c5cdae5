#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gea/rng.hpp"

namespace gea {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

inline std::string shape_str(const Mat& m) { return shape_str(m.rows(), m.cols()); }

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline void check_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw std::runtime_error(std::string(what) + ": non-finite entries");
}

// Row-wise softmax with max-subtraction.
inline Mat stable_softmax_rows(const Mat& x) {
    Mat p(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        Eigen::Array<double, 1, Eigen::Dynamic> e = (x.row(i).array() - m).exp();
        p.row(i) = (e / e.sum()).matrix();
    }
    return p;
}

// Glorot-uniform init, entries drawn in row-major order so the fill is
// reproducible independent of storage layout.
inline Mat glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
    return w;
}

}  // namespace gea
