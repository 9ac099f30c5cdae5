#pragma once

#include <cstdint>
#include <vector>

#include "gea/matrix.hpp"

namespace gea {

struct KmeansResult {
    std::vector<int> assignments;     // one per input point
    Mat centroids;                    // k x d
    int iterations = 0;
    std::vector<double> wcss_history; // within-cluster sum of squares per iteration
};

// Lloyd's iterations from k-means++ seeding until the assignment fixpoint or
// 300 iterations. Throws if the input has fewer than k distinct points.
KmeansResult kmeans(const Mat& points, int k, std::uint64_t seed);

}  // namespace gea
