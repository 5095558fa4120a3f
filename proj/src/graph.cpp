#include "emlouv/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace emlouv {

Graph Graph::from_edges(int node_count, std::span<const WeightedEdge> edges) {
    if (node_count < 0) throw std::invalid_argument("node_count must be non-negative");
    const auto n = static_cast<std::size_t>(node_count);

    Graph g;
    g.node_count_ = node_count;
    g.self_loops_.assign(n, 0.0);

    std::vector<std::vector<Edge>> adj(n);
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= node_count || e.v < 0 || e.v >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.weight < 0.0) throw std::invalid_argument("negative edge weight");
        if (e.u == e.v) {
            g.self_loops_[static_cast<std::size_t>(e.u)] += e.weight;
        } else {
            adj[static_cast<std::size_t>(e.u)].push_back({e.v, e.weight});
            adj[static_cast<std::size_t>(e.v)].push_back({e.u, e.weight});
        }
    }

    g.offsets_.assign(n + 1, 0);
    g.degrees_.assign(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        auto& nbrs = adj[u];
        std::sort(nbrs.begin(), nbrs.end(),
                  [](const Edge& a, const Edge& b) { return a.neighbor < b.neighbor; });
        // merge duplicate neighbors, summing weights
        std::size_t out = 0;
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (out > 0 && nbrs[out - 1].neighbor == nbrs[i].neighbor) {
                nbrs[out - 1].weight += nbrs[i].weight;
            } else {
                nbrs[out++] = nbrs[i];
            }
        }
        nbrs.resize(out);

        double deg = 2.0 * g.self_loops_[u];
        for (const auto& e : nbrs) deg += e.weight;
        g.degrees_[u] = deg;
        g.total_weight_2m_ += deg;

        g.offsets_[u + 1] = g.offsets_[u] + nbrs.size();
        g.adjacency_.insert(g.adjacency_.end(), nbrs.begin(), nbrs.end());
    }
    return g;
}

std::size_t Graph::self_loop_count() const {
    std::size_t c = 0;
    for (double w : self_loops_)
        if (w > 0.0) ++c;
    return c;
}

Partition Partition::singletons(int node_count) {
    Partition p;
    p.assignment.resize(static_cast<std::size_t>(node_count));
    for (int i = 0; i < node_count; ++i) p.assignment[static_cast<std::size_t>(i)] = i;
    p.community_count = node_count;
    return p;
}

Partition Partition::from_labels(std::span<const int> labels) {
    int max_label = -1;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("community label must be non-negative");
        max_label = std::max(max_label, l);
    }
    std::vector<int> remap(static_cast<std::size_t>(max_label + 1), -1);
    for (int l : labels) remap[static_cast<std::size_t>(l)] = 0;
    int next = 0;
    for (auto& r : remap)
        if (r == 0) r = next++;

    Partition p;
    p.assignment.reserve(labels.size());
    for (int l : labels) p.assignment.push_back(remap[static_cast<std::size_t>(l)]);
    p.community_count = next;
    return p;
}

void Partition::validate(int node_count) const {
    if (static_cast<int>(assignment.size()) != node_count)
        throw std::invalid_argument("partition size does not match node count");
    if (node_count == 0) return;
    if (community_count <= 0) throw std::invalid_argument("community_count must be positive");
    std::vector<bool> seen(static_cast<std::size_t>(community_count), false);
    for (int c : assignment) {
        if (c < 0 || c >= community_count)
            throw std::invalid_argument("community id out of range");
        seen[static_cast<std::size_t>(c)] = true;
    }
    for (bool s : seen)
        if (!s) throw std::invalid_argument("community ids are not dense");
}

std::vector<std::vector<int>> Partition::members() const {
    std::vector<std::vector<int>> m(static_cast<std::size_t>(community_count));
    for (std::size_t i = 0; i < assignment.size(); ++i)
        m[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
    return m;
}

Graph collapse(const Graph& graph, const Partition& partition) {
    partition.validate(graph.node_count());
    const int k = partition.community_count;

    std::vector<double> self(static_cast<std::size_t>(k), 0.0);
    std::vector<WeightedEdge> cross;
    for (int u = 0; u < graph.node_count(); ++u) {
        const int cu = partition.assignment[static_cast<std::size_t>(u)];
        self[static_cast<std::size_t>(cu)] += graph.self_loop(u);
        for (const auto& e : graph.neighbors(u)) {
            if (e.neighbor < u) continue; // count each undirected edge once
            const int cv = partition.assignment[static_cast<std::size_t>(e.neighbor)];
            if (cu == cv)
                self[static_cast<std::size_t>(cu)] += e.weight;
            else
                cross.push_back({cu, cv, e.weight});
        }
    }
    for (int c = 0; c < k; ++c)
        if (self[static_cast<std::size_t>(c)] > 0.0)
            cross.push_back({c, c, self[static_cast<std::size_t>(c)]});

    Graph coarse = Graph::from_edges(k, cross);
    // Mathematically identical; carrying the value over keeps it bit-exact.
    coarse.total_weight_2m_ = graph.total_weight();
    return coarse;
}

namespace {

bool parse_double(std::string_view tok, double& out) {
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

} // namespace

Graph load_edge_list(const std::string& path, bool weighted, std::vector<std::string>* node_names) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);

    std::unordered_map<std::string, int> ids;
    std::vector<std::string> names;
    std::vector<WeightedEdge> edges;

    auto intern = [&](const std::string& s) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(names.size()));
        if (inserted) names.push_back(s);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        if (auto pos = sv.find('#'); pos != std::string_view::npos) sv = sv.substr(0, pos);
        std::istringstream ls{std::string(sv)};
        std::string a, b, w;
        if (!(ls >> a)) continue; // blank/comment line
        if (!(ls >> b))
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two node ids");
        double weight = 1.0;
        if (weighted && (ls >> w)) {
            if (!parse_double(w, weight))
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad weight '" + w + "'");
        }
        std::string extra;
        if (ls >> extra)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": trailing token '" + extra + "'");
        if (weight < 0.0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": negative weight");
        edges.push_back({intern(a), intern(b), weight});
    }

    Graph g = Graph::from_edges(static_cast<int>(names.size()), edges);
    if (node_names) *node_names = std::move(names);
    return g;
}

void save_edge_list(const Graph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    out.precision(17);
    for (int u = 0; u < graph.node_count(); ++u) {
        if (graph.self_loop(u) > 0.0) out << u << ' ' << u << ' ' << graph.self_loop(u) << '\n';
        for (const auto& e : graph.neighbors(u))
            if (e.neighbor > u) out << u << ' ' << e.neighbor << ' ' << e.weight << '\n';
    }
}

} // namespace emlouv
