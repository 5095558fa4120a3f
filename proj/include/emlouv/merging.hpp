#pragma once

#include <span>
#include <string>
#include <vector>

#include "emlouv/embedding.hpp"
#include "emlouv/graph.hpp"

namespace emlouv {

struct MergeConfig {
    double t_initial = 0.5;  // starting distance threshold, (0, 2]
    double alpha = 0.05;     // threshold decrement after a zero-merge pass
    double t_min = 0.0;      // floor; threshold below this stops the loop
    int it_max = 50;         // inner pass cap
    int target_communities = 0; // 0 = unsupervised (inner loop only)
    int outer_max = 10;

    bool has_target() const { return target_communities > 0; }
    void validate() const; // throws std::invalid_argument
};

enum class MergeStop { threshold_floor, iteration_cap, target_reached, converged };
const char* to_string(MergeStop reason);

struct MergeTrace {
    struct Record {
        double threshold;
        int merges;
        int community_count;
    };
    std::vector<Record> records;
    MergeStop stop_reason = MergeStop::converged;
    int rounds = 1;
};

// Mean cosine distance from the members of one community to another
// community's centroid.
double community_pair_distance(const EmbeddingMatrix& embeddings, std::span<const int> members_i,
                               const Centroid& centroid_j);

// One merging pass: all pair distances (min of the two directions), pairs
// below threshold united in ascending distance order, partition re-densified.
struct MergePassResult {
    Partition partition;
    int merges = 0;
};
MergePassResult merge_pass(const Partition& partition, const EmbeddingMatrix& embeddings,
                           double threshold);

// Decaying-threshold merge loop; with a target community count set, reruns
// itself on per-community centroid rows until the target, convergence, or
// outer_max rounds.
struct MergeResult {
    Partition partition;
    MergeTrace trace;
};
MergeResult iterative_merge(const Partition& partition, const EmbeddingMatrix& embeddings,
                            const MergeConfig& config);

} // namespace emlouv
