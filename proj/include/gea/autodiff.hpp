#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gea::ad {

// Handle to a node on a Tape. Plain index; cheap to copy.
struct Var {
    int id = -1;
};

// Reverse-mode automatic differentiation over dense Eigen matrices.
//
// A Tape records every primitive operation in creation order; because an
// operation can only consume earlier nodes, walking the record backwards
// visits nodes in reverse topological order. Gradients are zero until a
// backward pass touches them.
template <typename Scalar>
class Tape {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Var leaf(Mat value) {
        nodes_.push_back(Node{std::move(value), Mat(), nullptr});
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    const Mat& value(Var v) const { return node(v).value; }

    const Mat& grad(Var v) {
        Node& n = node(v);
        if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
        return n.grad;
    }

    int size() const { return static_cast<int>(nodes_.size()); }

    // Seeds d(loss)/d(loss) = 1 and propagates to every node below it.
    void backward(Var loss) {
        Node& top = node(loss);
        if (top.value.rows() != 1 || top.value.cols() != 1)
            throw std::invalid_argument("backward: loss must be scalar (1x1), got " +
                                        std::to_string(top.value.rows()) + "x" +
                                        std::to_string(top.value.cols()));
        accum(loss.id, Mat::Ones(1, 1));
        for (int i = loss.id; i >= 0; --i) {
            Node& n = nodes_[static_cast<size_t>(i)];
            if (n.backward && n.grad.size() != 0) n.backward(*this);
        }
    }

    // --- primitive ops -----------------------------------------------------

    Var matmul(Var a, Var b) {
        const Mat& va = value(a);
        const Mat& vb = value(b);
        if (va.cols() != vb.rows())
            throw std::invalid_argument("matmul: dimension mismatch " + shape(va) + " * " + shape(vb));
        Var out = leaf(va * vb);
        node(out).backward = [a, b, out](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(a.id, g * t.value(b).transpose());
            t.accum(b.id, t.value(a).transpose() * g);
        };
        return out;
    }

    Var add(Var a, Var b) {
        check_same_shape("add", a, b);
        Var out = leaf(value(a) + value(b));
        node(out).backward = [a, b, out](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(a.id, g);
            t.accum(b.id, g);
        };
        return out;
    }

    Var sub(Var a, Var b) {
        check_same_shape("sub", a, b);
        Var out = leaf(value(a) - value(b));
        node(out).backward = [a, b, out](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(a.id, g);
            t.accum(b.id, -g);
        };
        return out;
    }

    // elementwise (Hadamard) product
    Var mul(Var a, Var b) {
        check_same_shape("mul", a, b);
        Var out = leaf(value(a).cwiseProduct(value(b)));
        node(out).backward = [a, b, out](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(a.id, g.cwiseProduct(t.value(b)));
            t.accum(b.id, g.cwiseProduct(t.value(a)));
        };
        return out;
    }

    Var scale(Var a, Scalar c) {
        Var out = leaf(value(a) * c);
        node(out).backward = [a, c, out](Tape& t) { t.accum(a.id, t.node(out).grad * c); };
        return out;
    }

    Var add_scalar(Var a, Scalar c) {
        Var out = leaf((value(a).array() + c).matrix());
        node(out).backward = [a, out](Tape& t) { t.accum(a.id, t.node(out).grad); };
        return out;
    }

    Var relu(Var a) {
        Var out = leaf(value(a).cwiseMax(Scalar(0)));
        node(out).backward = [a, out](Tape& t) {
            const Mat mask = (t.value(a).array() > Scalar(0)).template cast<Scalar>().matrix();
            t.accum(a.id, t.node(out).grad.cwiseProduct(mask));
        };
        return out;
    }

    Var sigmoid(Var a) {
        // 1/(1+e^-x) computed branch-free and overflow-safe
        Mat s = value(a).unaryExpr([](Scalar x) {
            if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
            const Scalar e = std::exp(x);
            return e / (Scalar(1) + e);
        });
        Var out = leaf(std::move(s));
        node(out).backward = [a, out](Tape& t) {
            const Mat& s = t.value(out);
            t.accum(a.id, t.node(out).grad.cwiseProduct(s.cwiseProduct(Mat::Ones(s.rows(), s.cols()) - s)));
        };
        return out;
    }

    Var log(Var a) {
        Var out = leaf(value(a).array().log().matrix());
        node(out).backward = [a, out](Tape& t) {
            t.accum(a.id, t.node(out).grad.cwiseQuotient(t.value(a)));
        };
        return out;
    }

    // row-wise softmax with max-subtraction for stability
    Var softmax_rows(Var a) {
        const Mat& x = value(a);
        Mat p(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Scalar m = x.row(i).maxCoeff();
            Eigen::Array<Scalar, 1, Eigen::Dynamic> e = (x.row(i).array() - m).exp();
            p.row(i) = (e / e.sum()).matrix();
        }
        Var out = leaf(std::move(p));
        node(out).backward = [a, out](Tape& t) {
            const Mat& p = t.value(out);
            const Mat& g = t.node(out).grad;
            Mat gx(p.rows(), p.cols());
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const Scalar dot = g.row(i).dot(p.row(i));
                gx.row(i) = p.row(i).array() * (g.row(i).array() - dot);
            }
            t.accum(a.id, gx);
        };
        return out;
    }

    Var transpose(Var a) {
        Var out = leaf(value(a).transpose());
        node(out).backward = [a, out](Tape& t) { t.accum(a.id, t.node(out).grad.transpose()); };
        return out;
    }

    Var concat_cols(Var a, Var b) {
        const Mat& va = value(a);
        const Mat& vb = value(b);
        if (va.rows() != vb.rows())
            throw std::invalid_argument("concat_cols: row mismatch " + shape(va) + " | " + shape(vb));
        Mat c(va.rows(), va.cols() + vb.cols());
        c << va, vb;
        Var out = leaf(std::move(c));
        const Eigen::Index ca = va.cols();
        node(out).backward = [a, b, out, ca](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(a.id, g.leftCols(ca));
            t.accum(b.id, g.rightCols(g.cols() - ca));
        };
        return out;
    }

    // m + row broadcast over every row of m (bias term)
    Var add_row_broadcast(Var m, Var row) {
        const Mat& vm = value(m);
        const Mat& vr = value(row);
        if (vr.rows() != 1 || vr.cols() != vm.cols())
            throw std::invalid_argument("add_row_broadcast: bias shape " + shape(vr) +
                                        " does not match " + shape(vm));
        Var out = leaf(vm.rowwise() + vr.row(0));
        node(out).backward = [m, row, out](Tape& t) {
            const Mat& g = t.node(out).grad;
            t.accum(m.id, g);
            t.accum(row.id, g.colwise().sum());
        };
        return out;
    }

    Var sum(Var a) {
        Var out = leaf(Mat::Constant(1, 1, value(a).sum()));
        node(out).backward = [a, out](Tape& t) {
            const Mat& va = t.value(a);
            t.accum(a.id, Mat::Constant(va.rows(), va.cols(), t.node(out).grad(0, 0)));
        };
        return out;
    }

private:
    struct Node {
        Mat value;
        Mat grad;  // empty until touched by backward
        std::function<void(Tape&)> backward;
    };

    Node& node(Var v) {
        if (v.id < 0 || v.id >= size()) throw std::invalid_argument("Var is not on this tape");
        return nodes_[static_cast<size_t>(v.id)];
    }
    const Node& node(Var v) const {
        if (v.id < 0 || v.id >= size()) throw std::invalid_argument("Var is not on this tape");
        return nodes_[static_cast<size_t>(v.id)];
    }

    void accum(int id, const Mat& g) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (n.grad.size() == 0)
            n.grad = g;
        else
            n.grad += g;
    }

    void check_same_shape(const char* op, Var a, Var b) const {
        const Mat& va = value(a);
        const Mat& vb = value(b);
        if (va.rows() != vb.rows() || va.cols() != vb.cols())
            throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape(va) + " vs " + shape(vb));
    }

    static std::string shape(const Mat& m) {
        return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
    }

    std::vector<Node> nodes_;
};

using TapeD = Tape<double>;

}  // namespace gea::ad
