#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace emlouv {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 1.0;
};

// Undirected weighted sparse graph in CSR form.
//
// Self-loops are kept out of the adjacency and stored per node; a self-loop of
// weight w contributes 2w to its node's weighted degree, which keeps modularity
// exact under community collapse. total_weight() is the 2m normalizer: the sum
// of all weighted degrees.
class Graph {
public:
    struct Edge {
        int neighbor;
        double weight;
    };

    Graph() = default;

    // Builds a symmetric graph from an edge list. Duplicate edges (in either
    // direction) have their weights summed; u == v entries become self-loops.
    static Graph from_edges(int node_count, std::span<const WeightedEdge> edges);

    int node_count() const { return node_count_; }
    std::span<const Edge> neighbors(int u) const {
        return {adjacency_.data() + offsets_[static_cast<std::size_t>(u)],
                adjacency_.data() + offsets_[static_cast<std::size_t>(u) + 1]};
    }
    double self_loop(int u) const { return self_loops_[static_cast<std::size_t>(u)]; }
    double degree(int u) const { return degrees_[static_cast<std::size_t>(u)]; }
    // 2m: sum of weighted degrees (self-loop weight counted twice).
    double total_weight() const { return total_weight_2m_; }
    // Number of distinct undirected non-self edges.
    std::size_t undirected_edge_count() const { return adjacency_.size() / 2; }
    std::size_t self_loop_count() const;

private:
    int node_count_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<Edge> adjacency_;
    std::vector<double> self_loops_;
    std::vector<double> degrees_;
    double total_weight_2m_ = 0.0;

    friend Graph collapse(const Graph&, const struct Partition&);
};

// Node -> community assignment with dense community ids [0, community_count).
struct Partition {
    std::vector<int> assignment;
    int community_count = 0;

    static Partition singletons(int node_count);
    // Relabels arbitrary non-negative labels to dense ids (ascending label order).
    static Partition from_labels(std::span<const int> labels);

    int size() const { return static_cast<int>(assignment.size()); }
    // Throws if ids are not dense or out of range.
    void validate(int node_count) const;
    std::vector<std::vector<int>> members() const;
};

// Collapses each community into a supernode. Inter-community weights are
// summed, intra-community weight becomes the supernode's self-loop, and
// total_weight() is carried over unchanged.
Graph collapse(const Graph& graph, const Partition& partition);

// Text edge list: one "u v [weight]" line per edge, '#' starts a comment.
// String ids are densified in first-appearance order; optional out-param
// receives the id table.
Graph load_edge_list(const std::string& path, bool weighted,
                     std::vector<std::string>* node_names = nullptr);
void save_edge_list(const Graph& graph, const std::string& path);

} // namespace emlouv
