#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emlouv/dataset.hpp"

namespace emlouv {

// Dense row-per-node embedding matrix.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> data; // row-major

    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows_, std::size_t dim_)
        : rows(rows_), dim(dim_), data(rows_ * dim_, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
};

struct Centroid {
    std::vector<double> vector;
    int member_count = 0;
};

// k-hop normalized feature propagation: E = A_hat^hops * X with
// A_hat = D^{-1/2} (A + I) D^{-1/2}. Parameter-free stand-in for a trained
// graph encoder; deterministic, output dim = feature_dim.
EmbeddingMatrix propagate_features(const LabeledDataset& dataset, int hops);

// CSV loader for externally generated embeddings: one node per line in dense-id
// order, comma-separated reals, no header.
EmbeddingMatrix load_embeddings(const std::string& path, std::size_t expected_rows);
void save_embeddings(const EmbeddingMatrix& embeddings, const std::string& path);

// Scales every row to unit L2 norm; rows with norm < 1e-12 are left untouched.
void l2_normalize_rows(EmbeddingMatrix& embeddings);

// 1 - cos(a, b), range [0, 2]. If either norm is < 1e-12 the distance is the
// neutral value 1, so degenerate rows never poison an objective with NaNs.
double cosine_distance(std::span<const double> a, std::span<const double> b);

Centroid centroid(const EmbeddingMatrix& embeddings, std::span<const int> members);

} // namespace emlouv
