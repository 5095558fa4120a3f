#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately recompute everything from the textbook definitions (dense
// matrices, full re-evaluation) rather than reusing library internals.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "emlouv/graph.hpp"
#include "emlouv/random.hpp"

namespace testutil {

// Q = (1/2m) sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j], with A_uu = 2 * self
inline double modularity_oracle(const emlouv::Graph& g, const emlouv::Partition& p) {
    const int n = g.node_count();
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int u = 0; u < n; ++u) {
        a[static_cast<std::size_t>(u)][static_cast<std::size_t>(u)] = 2.0 * g.self_loop(u);
        for (const auto& e : g.neighbors(u))
            a[static_cast<std::size_t>(u)][static_cast<std::size_t>(e.neighbor)] += e.weight;
    }
    std::vector<double> k(static_cast<std::size_t>(n), 0.0);
    double two_m = 0.0;
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) k[static_cast<std::size_t>(u)] += a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        two_m += k[static_cast<std::size_t>(u)];
    }
    if (two_m <= 0.0) return 0.0;
    double q = 0.0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (p.assignment[static_cast<std::size_t>(u)] == p.assignment[static_cast<std::size_t>(v)])
                q += a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] -
                     k[static_cast<std::size_t>(u)] * k[static_cast<std::size_t>(v)] / two_m;
    return q / two_m;
}

inline emlouv::Graph random_graph(int n, double edge_prob, emlouv::Rng& rng,
                                  bool weighted = false) {
    std::vector<emlouv::WeightedEdge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < edge_prob)
                edges.push_back({u, v, weighted ? 0.5 + rng.next_double() : 1.0});
    return emlouv::Graph::from_edges(n, edges);
}

inline emlouv::Partition random_partition(int n, int max_groups, emlouv::Rng& rng) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        labels[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_groups)));
    return emlouv::Partition::from_labels(labels);
}

// all set partitions of {0..n-1} as restricted growth strings
inline std::vector<std::vector<int>> all_partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int i, int max_used) -> void {
        if (i == n) {
            out.push_back(a);
            return;
        }
        for (int c = 0; c <= max_used + 1; ++c) {
            a[static_cast<std::size_t>(i)] = c;
            self(self, i + 1, std::max(max_used, c));
        }
    };
    rec(rec, 0, -1);
    return out;
}

inline emlouv::Graph two_triangles() {
    const emlouv::WeightedEdge edges[] = {{0, 1, 1}, {1, 2, 1}, {0, 2, 1},
                                          {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
    return emlouv::Graph::from_edges(6, edges);
}

// fresh scratch directory under the test binary's working directory
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::path("test_tmp") / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace testutil
