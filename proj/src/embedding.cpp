#include "gea/embedding.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gea {

Mat EmbeddingMatrix::select(const std::vector<int>& ids) const {
    std::unordered_map<int, int> index;
    index.reserve(node_ids.size());
    for (int i = 0; i < count(); ++i) index[node_ids[static_cast<size_t>(i)]] = i;
    Mat out(static_cast<Eigen::Index>(ids.size()), rows.cols());
    for (size_t k = 0; k < ids.size(); ++k) {
        auto it = index.find(ids[k]);
        if (it == index.end())
            throw std::invalid_argument("EmbeddingMatrix::select: unknown node id " +
                                        std::to_string(ids[k]));
        out.row(static_cast<Eigen::Index>(k)) = rows.row(it->second);
    }
    return out;
}

void EmbeddingMatrix::l2_normalize_rows() {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double norm = rows.row(i).norm();
        if (norm > 0.0) rows.row(i) /= norm;
    }
}

void save_embeddings_csv(const EmbeddingMatrix& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embeddings file: " + path);
    char buf[64];
    for (int i = 0; i < e.count(); ++i) {
        out << e.node_ids[static_cast<size_t>(i)];
        for (int j = 0; j < e.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", e.rows(i, j));
            out << "," << buf;
        }
        out << "\n";
    }
}

EmbeddingMatrix load_embeddings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
    std::vector<int> ids;
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2)
            throw std::runtime_error("embeddings file " + path + ":" + std::to_string(lineno) +
                                     ": expected \"node_id,values...\"");
        if (rows.empty())
            width = cells.size() - 1;
        else if (cells.size() - 1 != width)
            throw std::runtime_error("embeddings file " + path + ":" + std::to_string(lineno) +
                                     ": ragged row");
        ids.push_back(std::stoi(cells[0]));
        std::vector<double> row;
        row.reserve(width);
        for (size_t j = 1; j < cells.size(); ++j) row.push_back(std::stod(cells[j]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("embeddings file is empty: " + path);
    EmbeddingMatrix e;
    e.node_ids = std::move(ids);
    e.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < width; ++j)
            e.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return e;
}

}  // namespace gea
