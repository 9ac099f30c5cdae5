#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gea/kmeans.hpp"
#include "gea/rng.hpp"

using gea::Mat;

TEST_CASE("two separated pairs split cleanly") {
    Mat pts(4, 1);
    pts << 0.0, 0.1, 10.0, 10.1;
    const auto r = gea::kmeans(pts, 2, 1);
    CHECK(r.assignments[0] == r.assignments[1]);
    CHECK(r.assignments[2] == r.assignments[3]);
    CHECK(r.assignments[0] != r.assignments[2]);
}

TEST_CASE("k=1 centroid is the mean") {
    gea::Rng rng(3);
    Mat pts(50, 3);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 3; ++j) pts(i, j) = rng.normal();
    const auto r = gea::kmeans(pts, 1, 7);
    CHECK((r.centroids.row(0) - pts.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("planted 1-D Gaussians recovered up to relabeling") {
    gea::Rng rng(11);
    const int n = 200;
    Mat pts(n, 1);
    std::vector<int> planted(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int c = i % 2;
        planted[static_cast<size_t>(i)] = c;
        pts(i, 0) = (c == 0 ? 0.0 : 5.0) + 0.5 * rng.normal();
    }
    const auto r = gea::kmeans(pts, 2, 5);
    long agree = 0;
    for (int i = 0; i < n; ++i) agree += r.assignments[static_cast<size_t>(i)] == planted[static_cast<size_t>(i)];
    const double frac = std::max(agree, n - agree) / static_cast<double>(n);
    CHECK(frac >= 0.99);
}

TEST_CASE("within-cluster sum of squares never increases") {
    gea::Rng rng(17);
    Mat pts(120, 2);
    for (int i = 0; i < 120; ++i)
        for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform(-3, 3);
    const auto r = gea::kmeans(pts, 4, 23);
    for (size_t i = 1; i < r.wcss_history.size(); ++i)
        CHECK(r.wcss_history[i] <= r.wcss_history[i - 1] + 1e-9);
}

TEST_CASE("fewer distinct points than k throws") {
    Mat pts(4, 1);
    pts << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(gea::kmeans(pts, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(gea::kmeans(pts, 5, 1), std::invalid_argument);
}

TEST_CASE("same seed same clustering") {
    gea::Rng rng(29);
    Mat pts(60, 2);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 2; ++j) pts(i, j) = rng.normal();
    const auto a = gea::kmeans(pts, 3, 99);
    const auto b = gea::kmeans(pts, 3, 99);
    CHECK(a.assignments == b.assignments);
}
