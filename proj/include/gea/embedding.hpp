#pragma once

#include <string>
#include <vector>

#include "gea/matrix.hpp"

namespace gea {

// Per-node embedding rows. This is the released artifact every attack
// consumes; node_ids[i] identifies rows(i) in the source graph.
struct EmbeddingMatrix {
    std::vector<int> node_ids;
    Mat rows;

    int dim() const { return static_cast<int>(rows.cols()); }
    int count() const { return static_cast<int>(rows.rows()); }

    // rows selected by original node id; throws on unknown id
    Mat select(const std::vector<int>& ids) const;

    void l2_normalize_rows();
};

// CSV lines "node_id,v0,...,v{d-1}" with full float precision; no header.
void save_embeddings_csv(const EmbeddingMatrix& e, const std::string& path);
EmbeddingMatrix load_embeddings_csv(const std::string& path);

}  // namespace gea
