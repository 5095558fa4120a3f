#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "emlouv/embedding.hpp"
#include "emlouv/graph.hpp"

namespace emlouv {

struct LouvainConfig {
    enum class Objective { modularity_only, combined };

    Objective objective = Objective::modularity_only;
    double log_base_p = 2.718281828459045235; // base of the log damping in the combined score
    double distance_epsilon = 1e-9;           // clamp for 1/D
    int max_levels = 20;
    double min_gain = 1e-9; // a move must beat staying put by this much
    std::uint64_t seed = 42;

    void validate() const; // throws std::invalid_argument
};

// Partition of one level's supernode graph plus its modularity.
struct LevelResult {
    Partition partition;
    double modularity = 0.0;
    int levels_so_far = 0;
};

struct LouvainResult {
    Partition partition;  // on the original nodes
    double modularity = 0.0; // modularity of `partition` on the original graph, any objective
    EmbeddingMatrix community_embeddings; // one centroid row per community (empty without embeddings)
    std::vector<LevelResult> levels;
};

// Fired once per accepted local move; assignment_after is the level graph's
// node -> community array with the move applied, delta_q the exact net
// modularity change of the move on that level graph.
struct MoveEvent {
    int level;
    int node;
    int from_community;
    int to_community;
    double delta_q;
};
using MoveObserver =
    std::function<void(const Graph& level_graph, std::span<const int> assignment_after, const MoveEvent&)>;

// Modularity via the per-community form sum_c (in_c/2m - (tot_c/2m)^2).
// A graph with zero total weight yields 0 (with a warning on stderr).
double modularity(const Graph& graph, const Partition& partition);

// Running per-community degree sums used by the incremental gain. The caller
// detaches a node, scores candidate insertions, then attaches it somewhere.
class LocalMoveState {
public:
    LocalMoveState(const Graph& graph, const Partition& initial);

    void detach(int node);
    void attach(int node, int community);

    // Gain of inserting a detached node into `community`:
    //   k_in/m - tot_c * k_node / (2 m^2)
    // Net modularity change of a full move is gain(target) - gain(old).
    double insertion_gain(int node, int community) const;
    // Same with the node->community edge weight already accumulated.
    double insertion_gain_with(double k_node_in, int node, int community) const;

    int community_of(int node) const { return assignment_[static_cast<std::size_t>(node)]; }
    double community_degree(int community) const { return tot_[static_cast<std::size_t>(community)]; }
    std::span<const int> assignment() const { return assignment_; }

private:
    const Graph& graph_;
    std::vector<int> assignment_;
    std::vector<double> tot_;
    double m_ = 0.0; // total_weight / 2
};

// Move score: log_p(1 + |delta_q|) + log_p(1 + 1 / max(|distance|, eps)).
double combined_objective(double delta_q, double distance, const LouvainConfig& config);

// Multi-level Louvain. embeddings may be null in modularity_only mode; in
// combined mode it must have one row per node (ideally L2-normalized).
// Both objectives accept only moves whose net modularity gain exceeds
// min_gain; the combined mode ranks the accepting candidates by the blended
// score instead of the raw gain, so embedding proximity decides between
// improving targets. Node visit order per level is a seed-controlled
// shuffle; ties between equally scored candidates go to the lowest
// community id.
LouvainResult run_louvain(const Graph& graph, const EmbeddingMatrix* embeddings,
                          const LouvainConfig& config, const MoveObserver& observer = {});

} // namespace emlouv
