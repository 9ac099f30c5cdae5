#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace gea {

enum class OptKind { sgd, adam };

// First-order optimizer over a fixed list of parameter matrices. The caller
// must pass parameters in the same order on every step; adam moments are
// keyed by position.
template <typename Scalar>
class Optimizer {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Optimizer(OptKind kind, Scalar learning_rate)
        : kind_(kind), lr_(learning_rate) {
        if (learning_rate <= Scalar(0))
            throw std::invalid_argument("Optimizer: learning rate must be positive");
    }

    OptKind kind() const { return kind_; }
    long step_count() const { return step_count_; }

    void step(std::vector<Mat*> params, const std::vector<const Mat*>& grads) {
        if (params.size() != grads.size())
            throw std::invalid_argument("Optimizer::step: parameter/gradient count mismatch");
        for (size_t i = 0; i < params.size(); ++i) {
            const Mat& g = *grads[i];
            Mat& p = *params[i];
            if (p.rows() != g.rows() || p.cols() != g.cols())
                throw std::invalid_argument(
                    "Optimizer::step: shape mismatch param " + std::to_string(p.rows()) + "x" +
                    std::to_string(p.cols()) + " vs grad " + std::to_string(g.rows()) + "x" +
                    std::to_string(g.cols()));
        }
        ++step_count_;
        if (kind_ == OptKind::sgd) {
            for (size_t i = 0; i < params.size(); ++i) *params[i] -= lr_ * (*grads[i]);
            return;
        }
        if (m_.size() != params.size()) {
            m_.clear();
            v_.clear();
            for (auto* p : params) {
                m_.push_back(Mat::Zero(p->rows(), p->cols()));
                v_.push_back(Mat::Zero(p->rows(), p->cols()));
            }
        }
        const Scalar b1 = beta1_, b2 = beta2_;
        const Scalar b1t = Scalar(1) - std::pow(b1, Scalar(step_count_));
        const Scalar b2t = Scalar(1) - std::pow(b2, Scalar(step_count_));
        for (size_t i = 0; i < params.size(); ++i) {
            const Mat& g = *grads[i];
            m_[i] = b1 * m_[i] + (Scalar(1) - b1) * g;
            v_[i] = b2 * v_[i] + (Scalar(1) - b2) * g.cwiseProduct(g);
            const Mat mhat = m_[i] / b1t;
            const Mat vhat = v_[i] / b2t;
            *params[i] -= lr_ * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
        }
    }

private:
    OptKind kind_;
    Scalar lr_;
    Scalar beta1_ = Scalar(0.9);
    Scalar beta2_ = Scalar(0.999);
    Scalar eps_ = Scalar(1e-8);
    long step_count_ = 0;
    std::vector<Mat> m_, v_;
};

using OptimizerD = Optimizer<double>;

}  // namespace gea
