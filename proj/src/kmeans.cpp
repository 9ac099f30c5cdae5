#include "gea/kmeans.hpp"

#include <limits>
#include <set>
#include <stdexcept>

#include "gea/rng.hpp"

namespace gea {

namespace {

int nearest_centroid(const Mat& centroids, const Eigen::RowVectorXd& p, double* dist_out) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c) - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

}  // namespace

KmeansResult kmeans(const Mat& points, int k, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    if (k <= 0) throw std::invalid_argument("kmeans: k must be positive");
    if (k > n) throw std::invalid_argument("kmeans: k exceeds point count");
    {
        std::set<std::vector<double>> distinct;
        for (int i = 0; i < n && static_cast<int>(distinct.size()) < k; ++i) {
            std::vector<double> row(static_cast<size_t>(points.cols()));
            for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<size_t>(j)] = points(i, j);
            distinct.insert(std::move(row));
        }
        if (static_cast<int>(distinct.size()) < k)
            throw std::invalid_argument("kmeans: fewer distinct points than k");
    }

    Rng rng(seed);
    Mat centroids(k, points.cols());

    // k-means++: first uniform, then proportional to squared distance
    centroids.row(0) = points.row(rng.uniform_index(n));
    std::vector<double> d2(static_cast<size_t>(n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int cc = 0; cc < c; ++cc)
                best = std::min(best, (centroids.row(cc) - points.row(i)).squaredNorm());
            d2[static_cast<size_t>(i)] = best;
            total += best;
        }
        int chosen = -1;
        if (total <= 0.0) {
            chosen = rng.uniform_index(n);
        } else {
            double target = rng.uniform() * total;
            for (int i = 0; i < n; ++i) {
                target -= d2[static_cast<size_t>(i)];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen < 0) chosen = n - 1;
        }
        centroids.row(c) = points.row(chosen);
    }

    KmeansResult result;
    result.assignments.assign(static_cast<size_t>(n), -1);
    constexpr int kMaxIterations = 300;
    for (int it = 0; it < kMaxIterations; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (int i = 0; i < n; ++i) {
            double d;
            const int c = nearest_centroid(centroids, points.row(i), &d);
            wcss += d;
            if (c != result.assignments[static_cast<size_t>(i)]) {
                result.assignments[static_cast<size_t>(i)] = c;
                changed = true;
            }
        }
        result.wcss_history.push_back(wcss);
        result.iterations = it + 1;
        if (!changed) break;

        Mat sums = Mat::Zero(k, points.cols());
        std::vector<int> counts(static_cast<size_t>(k), 0);
        for (int i = 0; i < n; ++i) {
            sums.row(result.assignments[static_cast<size_t>(i)]) += points.row(i);
            ++counts[static_cast<size_t>(result.assignments[static_cast<size_t>(i)])];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<size_t>(c)] > 0)
                centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
        // empty clusters keep their previous centroid
    }
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace gea
