#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emlouv/dataset.hpp"
#include "emlouv/embedding.hpp"
#include "emlouv/graph.hpp"

namespace emlouv {

struct CommunityScore {
    int community = 0;
    int size = 0;
    int majority_class = 0;
    double intra_accuracy = 0.0;
};

struct EvalReport {
    double inter_accuracy = 0.0;          // unweighted mean of intra accuracies
    double size_weighted_accuracy = 0.0;  // node-weighted variant, diagnostic only
    std::vector<CommunityScore> per_community;
    int community_count = 0;
    double modularity = 0.0;
};

// Majority-class share of one community; ties go to the lowest class id.
struct IntraAccuracy {
    double accuracy;
    int majority_class;
};
IntraAccuracy intra_accuracy(std::span<const int> community_members, std::span<const int> labels);

// Inter-community accuracy: the plain mean over communities, not
// size-weighted. Pass the graph to have modularity filled in.
EvalReport evaluate_partition(const Partition& partition, std::span<const int> labels,
                              const Graph* graph = nullptr);

// Embedding-separation diagnostic: one synthetic community per class from
// seed-sampled nodes, then mean member-vs-outsider distance to each centroid.
struct ClassDistanceRow {
    int class_id = 0;
    std::string class_name;
    double mean_same_class_distance = 0.0;
    double mean_other_class_distance = 0.0;
};
std::vector<ClassDistanceRow> hypothesis_check(const LabeledDataset& dataset,
                                               const EmbeddingMatrix& embeddings,
                                               int nodes_per_class, int samples,
                                               std::uint64_t seed);

} // namespace emlouv
