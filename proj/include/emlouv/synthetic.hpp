#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace emlouv::synthetic {

// Recipe for a deterministic citation-style benchmark: class-correlated
// binary features and a topology of intra-class topic clusters, a giant
// component wired from most of them, and a tail of small detached components.
struct BenchmarkSpec {
    std::string name;
    std::vector<std::string> class_names;
    std::vector<int> class_sizes;
    int feature_dim = 0;
    int edge_count = 0;           // exact number of unique undirected edges
    int active_features_min = 12; // active features per node, uniform range
    int active_features_max = 28;
    double in_band_probability = 0.82; // chance an active feature comes from the class band
    double topic_share = 0.5;  // slice of an in-band draw taken from the cluster's topic subset
    int topic_features = 100;  // topic subset size within the class band, clamped to the band
    int cluster_size_min = 8;
    int cluster_size_max = 30;
    double detached_fraction = 0.22;   // share of clusters left as separate components
    double cross_class_edge_fraction = 0.24;
    double intra_class_bridge_fraction = 0.10;
    // share of nodes whose written label is rotated onto another node's class;
    // features and topology keep the host class, and per-class totals are
    // preserved exactly
    double label_noise = 0.0;
};

BenchmarkSpec cora_like();
BenchmarkSpec citeseer_like();

struct BenchmarkFiles {
    std::string content_path;
    std::string cites_path;
};

// Writes <dir>/<name>.content and <dir>/<name>.cites. Same spec + seed gives
// byte-identical files.
BenchmarkFiles write_benchmark(const BenchmarkSpec& spec, const std::string& dir,
                               std::uint64_t seed);

} // namespace emlouv::synthetic
