#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emlouv/graph.hpp"

namespace emlouv {

// A citation-network benchmark: graph topology plus per-node features and
// ground-truth class labels.
struct LabeledDataset {
    Graph graph;
    std::size_t feature_dim = 0;
    std::vector<double> features; // row-major, node_count x feature_dim
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> node_names;
    std::vector<std::string> class_names;

    struct LoadStats {
        std::size_t cites_lines = 0;
        std::size_t dropped_unknown = 0;  // citation rows naming ids absent from the content file
        std::size_t self_citations = 0;
        std::size_t unique_undirected_edges = 0;
        std::size_t duplicate_pairs = 0;  // reciprocal/duplicated citations folded into edge weights
    } stats;

    std::span<const double> feature_row(int node) const {
        return {features.data() + static_cast<std::size_t>(node) * feature_dim, feature_dim};
    }
};

// Loads the .content/.cites tab-separated convention:
//   content: node_id <ws> f_1 ... f_d <ws> class_name
//   cites:   cited_id <ws> citing_id
// Edges are symmetrized; duplicates are weight-summed; citations naming
// unknown node ids are dropped and counted in stats. Nodes that never appear
// in the cites file are kept as degree-0 nodes.
LabeledDataset load_citation_dataset(const std::string& content_path,
                                     const std::string& cites_path);

} // namespace emlouv
