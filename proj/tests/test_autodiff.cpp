#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gea/autodiff.hpp"
#include "gea/matrix.hpp"
#include "gea/optim.hpp"
#include "gea/rng.hpp"

using gea::Mat;
using gea::ad::TapeD;
using gea::ad::Var;

namespace {

// independent oracle: naive triple loop
Mat naive_matmul(const Mat& a, const Mat& b) {
    Mat c = Mat::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

Mat random_mat(Eigen::Index r, Eigen::Index c, gea::Rng& rng) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

// two-layer net loss used by the finite-difference checks
double net_loss(const std::vector<Mat>& weights, const Mat& x) {
    TapeD t;
    Var w0 = t.leaf(weights[0]);
    Var w1 = t.leaf(weights[1]);
    Var h = t.relu(t.matmul(t.leaf(x), w0));
    Var z = t.sigmoid(t.matmul(h, w1));
    Var loss = t.sum(t.mul(z, z));
    return t.value(loss)(0, 0);
}

}  // namespace

TEST_CASE("matmul identity and annihilator") {
    gea::Rng rng(7);
    const Mat m = random_mat(3, 3, rng);
    TapeD t;
    Var vm = t.leaf(m);
    CHECK(t.value(t.matmul(t.leaf(Mat::Identity(3, 3)), vm)).isApprox(m, 1e-15));
    CHECK(t.value(t.matmul(t.leaf(Mat::Zero(3, 3)), vm)).isZero(0.0));
}

TEST_CASE("matmul small known product") {
    Mat a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    const Mat expected = naive_matmul(a, b);  // [[19,22],[43,50]]
    CHECK(expected(0, 0) == 19);
    CHECK(expected(0, 1) == 22);
    CHECK(expected(1, 0) == 43);
    CHECK(expected(1, 1) == 50);
    TapeD t;
    CHECK(t.value(t.matmul(t.leaf(a), t.leaf(b))).isApprox(expected, 1e-15));
}

TEST_CASE("matmul matches naive oracle on random 8x8 inputs") {
    gea::Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat a = random_mat(8, 8, rng);
        const Mat b = random_mat(8, 8, rng);
        TapeD t;
        const Mat got = t.value(t.matmul(t.leaf(a), t.leaf(b)));
        const Mat want = naive_matmul(a, b);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("matmul dimension mismatch names both shapes") {
    TapeD t;
    Var a = t.leaf(Mat::Zero(2, 3));
    Var b = t.leaf(Mat::Zero(4, 5));
    CHECK_THROWS_WITH_AS(t.matmul(a, b), "matmul: dimension mismatch 2x3 * 4x5",
                         std::invalid_argument);
}

TEST_CASE("elementwise relu and sigmoid") {
    TapeD t;
    Mat x(1, 2);
    x << -1, 2;
    const Mat r = t.value(t.relu(t.leaf(x)));
    CHECK(r(0, 0) == 0.0);
    CHECK(r(0, 1) == 2.0);

    CHECK(t.value(t.sigmoid(t.leaf(Mat::Zero(1, 1))))(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // scalar oracle 1/(1+e^-x) at x = ln 3
    const double x0 = std::log(3.0);
    const double oracle = 1.0 / (1.0 + std::exp(-x0));
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(t.value(t.sigmoid(t.leaf(Mat::Constant(1, 1, x0))))(0, 0) ==
          doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("elementwise shape mismatch throws") {
    TapeD t;
    CHECK_THROWS_AS(t.add(t.leaf(Mat::Zero(2, 2)), t.leaf(Mat::Zero(2, 3))), std::invalid_argument);
    CHECK_THROWS_AS(t.mul(t.leaf(Mat::Zero(1, 2)), t.leaf(Mat::Zero(2, 1))), std::invalid_argument);
}

TEST_CASE("softmax rows: uniform, shift invariance, ratio oracle") {
    TapeD t;
    const Mat u = t.value(t.softmax_rows(t.leaf(Mat::Zero(1, 2))));
    CHECK(u(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    Mat c = Mat::Constant(1, 3, 42.5);
    const Mat uc = t.value(t.softmax_rows(t.leaf(c)));
    for (int j = 0; j < 3; ++j) CHECK(uc(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-12));

    // direct exponential-ratio oracle for [0, ln 3]
    Mat x(1, 2);
    x << 0.0, std::log(3.0);
    const double e0 = std::exp(0.0), e1 = std::exp(std::log(3.0));
    const Mat p = t.value(t.softmax_rows(t.leaf(x)));
    CHECK(p(0, 0) == doctest::Approx(e0 / (e0 + e1)).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(e1 / (e0 + e1)).epsilon(1e-12));
    CHECK(p(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and shift-invariant on random input") {
    gea::Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const Mat x = 10.0 * random_mat(4, 6, rng);
        TapeD t;
        const Mat p = t.value(t.softmax_rows(t.leaf(x)));
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-9);
        Mat shifted = x;
        shifted.array() += 123.456;
        const Mat p2 = t.value(t.softmax_rows(t.leaf(shifted)));
        CHECK((p - p2).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("backward: sum gives ones, zero-scaled loss gives zeros") {
    gea::Rng rng(5);
    const Mat w = random_mat(3, 4, rng);
    {
        TapeD t;
        Var vw = t.leaf(w);
        t.backward(t.sum(vw));
        CHECK(t.grad(vw).isApprox(Mat::Ones(3, 4), 1e-15));
    }
    {
        TapeD t;
        Var vw = t.leaf(w);
        Var f = t.sum(t.sigmoid(t.matmul(vw, t.leaf(random_mat(4, 2, rng)))));
        t.backward(t.scale(f, 0.0));
        CHECK(t.grad(vw).isZero(1e-15));
    }
}

TEST_CASE("backward requires scalar loss") {
    TapeD t;
    Var w = t.leaf(Mat::Zero(2, 2));
    CHECK_THROWS_AS(t.backward(w), std::invalid_argument);
    CHECK_THROWS_AS(t.backward(Var{123}), std::invalid_argument);
}

TEST_CASE("gradients match central finite differences on a 2-layer net") {
    gea::Rng rng(13);
    const Mat x = random_mat(5, 4, rng);
    std::vector<Mat> weights = {random_mat(4, 6, rng), random_mat(6, 3, rng)};

    TapeD t;
    Var w0 = t.leaf(weights[0]);
    Var w1 = t.leaf(weights[1]);
    Var h = t.relu(t.matmul(t.leaf(x), w0));
    Var z = t.sigmoid(t.matmul(h, w1));
    t.backward(t.sum(t.mul(z, z)));

    const double step = 1e-5;
    const Var vars[] = {w0, w1};
    for (int wi = 0; wi < 2; ++wi) {
        const Mat& analytic = t.grad(vars[wi]);
        for (Eigen::Index i = 0; i < weights[wi].rows(); ++i) {
            for (Eigen::Index j = 0; j < weights[wi].cols(); ++j) {
                std::vector<Mat> plus = weights, minus = weights;
                plus[wi](i, j) += step;
                minus[wi](i, j) -= step;
                const double fd = (net_loss(plus, x) - net_loss(minus, x)) / (2 * step);
                const double denom = std::max({std::abs(fd), std::abs(analytic(i, j)), 1e-8});
                CHECK(std::abs(fd - analytic(i, j)) / denom < 1e-4);
            }
        }
    }
}

TEST_CASE("gradient flows through softmax, log, concat, transpose, broadcast") {
    gea::Rng rng(17);
    const Mat x = random_mat(3, 4, rng);
    const Mat w = random_mat(8, 2, rng);
    const Mat bias = random_mat(1, 2, rng);

    auto loss_fn = [&](const Mat& wv, const Mat& bv) {
        TapeD t;
        Var vx = t.leaf(x);
        Var cat = t.concat_cols(vx, t.transpose(t.transpose(vx)));
        Var z = t.add_row_broadcast(t.matmul(cat, t.leaf(wv)), t.leaf(bv));
        Var p = t.softmax_rows(z);
        return t.value(t.sum(t.mul(p, t.log(t.add_scalar(p, 1e-9)))))(0, 0);
    };

    TapeD t;
    Var vw = t.leaf(w);
    Var vb = t.leaf(bias);
    Var vx = t.leaf(x);
    Var cat = t.concat_cols(vx, t.transpose(t.transpose(vx)));
    Var z = t.add_row_broadcast(t.matmul(cat, vw), vb);
    Var p = t.softmax_rows(z);
    t.backward(t.sum(t.mul(p, t.log(t.add_scalar(p, 1e-9)))));

    const double step = 1e-6;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            Mat wp = w, wm = w;
            wp(i, j) += step;
            wm(i, j) -= step;
            const double fd = (loss_fn(wp, bias) - loss_fn(wm, bias)) / (2 * step);
            CHECK(std::abs(fd - t.grad(vw)(i, j)) <
                  1e-4 * std::max({std::abs(fd), std::abs(t.grad(vw)(i, j)), 1e-6}));
        }
    for (Eigen::Index j = 0; j < bias.cols(); ++j) {
        Mat bp = bias, bm = bias;
        bp(0, j) += step;
        bm(0, j) -= step;
        const double fd = (loss_fn(w, bp) - loss_fn(w, bm)) / (2 * step);
        CHECK(std::abs(fd - t.grad(vb)(0, j)) <
              1e-4 * std::max({std::abs(fd), std::abs(t.grad(vb)(0, j)), 1e-6}));
    }
}

TEST_CASE("grad is zero before backward touches a node") {
    TapeD t;
    Var w = t.leaf(Mat::Ones(2, 2));
    CHECK(t.grad(w).isZero(0.0));
}

TEST_CASE("sgd step") {
    gea::OptimizerD opt(gea::OptKind::sgd, 0.1);
    Mat p = Mat::Constant(1, 1, 1.0);
    const Mat g = Mat::Constant(1, 1, 1.0);
    opt.step({&p}, {&g});
    CHECK(p(0, 0) == doctest::Approx(0.9).epsilon(1e-15));

    const Mat zero = Mat::Zero(1, 1);
    Mat before = p;
    opt.step({&p}, {&zero});
    CHECK(p(0, 0) == before(0, 0));
}

TEST_CASE("adam first step is approximately -lr * sign(g); zero grads change nothing") {
    // scalar adam oracle, first step
    const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8, g = 1.0;
    const double m = (1 - b1) * g, v = (1 - b2) * g * g;
    const double mhat = m / (1 - b1), vhat = v / (1 - b2);
    const double expected_delta = lr * mhat / (std::sqrt(vhat) + eps);
    CHECK(expected_delta == doctest::Approx(lr).epsilon(1e-6));

    gea::OptimizerD opt(gea::OptKind::adam, lr);
    Mat p = Mat::Constant(1, 1, 1.0);
    const Mat grad = Mat::Constant(1, 1, g);
    opt.step({&p}, {&grad});
    CHECK(p(0, 0) == doctest::Approx(1.0 - expected_delta).epsilon(1e-12));

    gea::OptimizerD opt2(gea::OptKind::adam, lr);
    Mat p2 = Mat::Constant(2, 2, 3.0);
    const Mat zg = Mat::Zero(2, 2);
    opt2.step({&p2}, {&zg});
    CHECK(p2.isApprox(Mat::Constant(2, 2, 3.0), 1e-15));
}

TEST_CASE("optimizer shape mismatch throws") {
    gea::OptimizerD opt(gea::OptKind::sgd, 0.1);
    Mat p = Mat::Zero(2, 2);
    const Mat g = Mat::Zero(2, 3);
    CHECK_THROWS_AS(opt.step({&p}, {&g}), std::invalid_argument);
}
