#include "emlouv/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "emlouv/random.hpp"

namespace emlouv::synthetic {

namespace {

struct Cluster {
    int cls = 0;
    bool detached = false;
    std::vector<int> nodes;
    std::vector<int> topic; // feature ids this cluster favors
};

void validate(const BenchmarkSpec& spec) {
    if (spec.name.empty()) throw std::invalid_argument("benchmark needs a name");
    if (spec.class_names.size() != spec.class_sizes.size() || spec.class_names.empty())
        throw std::invalid_argument("class_names and class_sizes must be non-empty and equal length");
    for (int s : spec.class_sizes)
        if (s < 1) throw std::invalid_argument("class sizes must be positive");
    if (spec.feature_dim < static_cast<int>(spec.class_sizes.size()))
        throw std::invalid_argument("feature_dim must be at least the class count");
    if (spec.edge_count < 1) throw std::invalid_argument("edge_count must be positive");
    if (spec.active_features_min < 1 || spec.active_features_max < spec.active_features_min ||
        spec.active_features_max > spec.feature_dim)
        throw std::invalid_argument("bad active feature range");
    if (spec.cluster_size_min < 1 || spec.cluster_size_max < spec.cluster_size_min)
        throw std::invalid_argument("bad cluster size range");
    if (spec.in_band_probability < 0.0 || spec.in_band_probability > 1.0 ||
        spec.topic_share < 0.0 || spec.topic_share > 1.0 ||
        spec.detached_fraction < 0.0 || spec.detached_fraction >= 1.0 ||
        spec.cross_class_edge_fraction < 0.0 || spec.cross_class_edge_fraction > 1.0 ||
        spec.intra_class_bridge_fraction < 0.0 || spec.intra_class_bridge_fraction > 1.0 ||
        spec.label_noise < 0.0 || spec.label_noise > 0.5)
        throw std::invalid_argument("fractions out of range");
    if (spec.topic_features < 1) throw std::invalid_argument("topic_features must be positive");
}

} // namespace

BenchmarkSpec cora_like() {
    BenchmarkSpec s;
    s.name = "cora_like";
    s.class_names = {"Case_Based",        "Genetic_Algorithms",     "Neural_Networks",
                     "Probabilistic_Methods", "Reinforcement_Learning", "Rule_Learning",
                     "Theory"};
    s.class_sizes = {298, 418, 818, 426, 217, 180, 351};
    s.feature_dim = 1433;
    s.edge_count = 5429;
    return s;
}

BenchmarkSpec citeseer_like() {
    BenchmarkSpec s;
    s.name = "citeseer_like";
    s.class_names = {"Agents", "AI", "DB", "IR", "ML", "HCI"};
    s.class_sizes = {596, 249, 701, 668, 590, 508};
    s.feature_dim = 3703;
    s.edge_count = 4732;
    return s;
}

BenchmarkFiles write_benchmark(const BenchmarkSpec& spec, const std::string& dir,
                               std::uint64_t seed) {
    validate(spec);
    const int k_classes = static_cast<int>(spec.class_sizes.size());
    int n = 0;
    for (int s : spec.class_sizes) n += s;

    Rng rng(seed);

    // class labels, shuffled over node ids
    std::vector<int> label;
    label.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < k_classes; ++k)
        label.insert(label.end(), static_cast<std::size_t>(spec.class_sizes[static_cast<std::size_t>(k)]), k);
    fisher_yates(label, rng);

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(k_classes));
    for (int i = 0; i < n; ++i) by_class[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])].push_back(i);

    // carve every class into topic clusters
    std::vector<Cluster> clusters;
    std::vector<std::vector<int>> class_clusters(static_cast<std::size_t>(k_classes));
    for (int k = 0; k < k_classes; ++k) {
        const auto& pool = by_class[static_cast<std::size_t>(k)];
        std::size_t pos = 0;
        while (pos < pool.size()) {
            auto want = static_cast<std::size_t>(
                rng.next_in(spec.cluster_size_min, spec.cluster_size_max));
            std::size_t rest = pool.size() - pos;
            if (want > rest || rest - want < static_cast<std::size_t>(spec.cluster_size_min))
                want = rest; // fold a too-small tail into the last cluster
            Cluster c;
            c.cls = k;
            c.nodes.assign(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                           pool.begin() + static_cast<std::ptrdiff_t>(pos + want));
            class_clusters[static_cast<std::size_t>(k)].push_back(static_cast<int>(clusters.size()));
            clusters.push_back(std::move(c));
            pos += want;
        }
    }

    // detach a share of each class's clusters; the first stays attached so the
    // giant component touches every class
    for (int k = 0; k < k_classes; ++k) {
        auto& ids = class_clusters[static_cast<std::size_t>(k)];
        const auto detach =
            static_cast<std::size_t>(spec.detached_fraction * static_cast<double>(ids.size()));
        std::vector<int> order(ids.begin() + 1, ids.end());
        fisher_yates(order, rng);
        for (std::size_t i = 0; i < detach && i < order.size(); ++i)
            clusters[static_cast<std::size_t>(order[i])].detached = true;
    }

    std::vector<int> node_cluster(static_cast<std::size_t>(n), -1);
    for (std::size_t ci = 0; ci < clusters.size(); ++ci)
        for (int u : clusters[ci].nodes) node_cluster[static_cast<std::size_t>(u)] = static_cast<int>(ci);

    std::set<std::pair<int, int>> edges;
    auto add_edge = [&](int u, int v) {
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        return edges.insert({u, v}).second;
    };

    // spanning tree inside every cluster
    for (const auto& c : clusters)
        for (std::size_t i = 1; i < c.nodes.size(); ++i)
            add_edge(c.nodes[i], c.nodes[static_cast<std::size_t>(rng.next_below(i))]);

    auto random_node_of = [&](const Cluster& c) {
        return c.nodes[static_cast<std::size_t>(rng.next_below(c.nodes.size()))];
    };

    // attach each class's non-detached clusters to each other (tree + extras)
    std::vector<int> attached_nodes;
    std::vector<std::vector<int>> attached_by_class(static_cast<std::size_t>(k_classes));
    for (int k = 0; k < k_classes; ++k) {
        std::vector<int> att;
        for (int ci : class_clusters[static_cast<std::size_t>(k)])
            if (!clusters[static_cast<std::size_t>(ci)].detached) att.push_back(ci);
        for (std::size_t i = 1; i < att.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.next_below(i));
            add_edge(random_node_of(clusters[static_cast<std::size_t>(att[i])]),
                     random_node_of(clusters[static_cast<std::size_t>(att[j])]));
        }
        for (int ci : att)
            for (int u : clusters[static_cast<std::size_t>(ci)].nodes) {
                attached_nodes.push_back(u);
                attached_by_class[static_cast<std::size_t>(k)].push_back(u);
            }
    }
    if (attached_nodes.empty()) throw std::invalid_argument("no attached clusters to wire up");

    const auto target = static_cast<std::size_t>(spec.edge_count);
    auto budget = [&](double fraction) {
        return static_cast<std::size_t>(fraction * static_cast<double>(spec.edge_count) + 0.5);
    };

    // extra intra-class bridges between attached clusters
    {
        std::size_t want = budget(spec.intra_class_bridge_fraction);
        std::size_t attempts = 0;
        while (want > 0 && edges.size() < target && attempts < 200 * target) {
            ++attempts;
            const int k = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k_classes)));
            const auto& att = attached_by_class[static_cast<std::size_t>(k)];
            if (att.size() < 2) continue;
            const int u = att[static_cast<std::size_t>(rng.next_below(att.size()))];
            const int v = att[static_cast<std::size_t>(rng.next_below(att.size()))];
            if (node_cluster[static_cast<std::size_t>(u)] == node_cluster[static_cast<std::size_t>(v)])
                continue;
            if (add_edge(u, v)) --want;
        }
    }

    // cross-class edges, each a single spoke into a large attached cluster of
    // the foreign class; big hosts sink spokes without merging, while two
    // small clusters linked directly would fuse under modularity's resolution
    // limit and breed mixed communities
    {
        const auto floor = static_cast<std::size_t>((spec.cluster_size_min + spec.cluster_size_max) / 2);
        std::vector<std::vector<int>> hosts(static_cast<std::size_t>(k_classes));
        for (int k = 0; k < k_classes; ++k) {
            auto& h = hosts[static_cast<std::size_t>(k)];
            int biggest = -1;
            for (int ci : class_clusters[static_cast<std::size_t>(k)]) {
                const auto& c = clusters[static_cast<std::size_t>(ci)];
                if (c.detached) continue;
                if (c.nodes.size() >= floor) h.push_back(ci);
                if (biggest < 0 || c.nodes.size() > clusters[static_cast<std::size_t>(biggest)].nodes.size())
                    biggest = ci;
            }
            if (h.empty()) h.push_back(biggest);
        }
        std::size_t want = budget(spec.cross_class_edge_fraction);
        std::size_t attempts = 0;
        while (want > 0 && edges.size() < target && attempts < 200 * target) {
            ++attempts;
            const int u = attached_nodes[static_cast<std::size_t>(rng.next_below(attached_nodes.size()))];
            const auto kv = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k_classes)));
            if (label[static_cast<std::size_t>(u)] == kv) continue;
            const auto& h = hosts[static_cast<std::size_t>(kv)];
            const int v = random_node_of(clusters[static_cast<std::size_t>(h[static_cast<std::size_t>(rng.next_below(h.size()))])]);
            if (add_edge(u, v)) --want;
        }
    }

    // fill the remainder with intra-cluster edges, widening scope if a draw
    // keeps colliding
    {
        std::size_t attempts = 0;
        while (edges.size() < target) {
            ++attempts;
            if (attempts > 400 * target)
                throw std::runtime_error("benchmark edge fill did not converge");
            const int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            const auto& c = clusters[static_cast<std::size_t>(node_cluster[static_cast<std::size_t>(u)])];
            if (attempts < 50 * target) {
                if (c.nodes.size() < 2) continue;
                add_edge(u, random_node_of(c));
            } else { // nearly saturated clusters: fall back to same-class pairs
                const auto& pool = by_class[static_cast<std::size_t>(label[static_cast<std::size_t>(u)])];
                add_edge(u, pool[static_cast<std::size_t>(rng.next_below(pool.size()))]);
            }
        }
    }

    // class-banded binary features with a per-cluster topic subset
    const int band_count = spec.feature_dim; // feature ids live in [0, band_count)
    auto band_begin = [&](int k) { return static_cast<int>(static_cast<long>(k) * band_count / k_classes); };
    for (auto& c : clusters) {
        const int lo = band_begin(c.cls), hi = band_begin(c.cls + 1);
        std::vector<int> band;
        band.reserve(static_cast<std::size_t>(hi - lo));
        for (int f = lo; f < hi; ++f) band.push_back(f);
        fisher_yates(band, rng);
        const auto t = std::min<std::size_t>(static_cast<std::size_t>(spec.topic_features), band.size());
        c.topic.assign(band.begin(), band.begin() + static_cast<std::ptrdiff_t>(t));
    }

    std::vector<std::vector<int>> active(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        const auto& c = clusters[static_cast<std::size_t>(node_cluster[static_cast<std::size_t>(u)])];
        const int lo = band_begin(c.cls), hi = band_begin(c.cls + 1);
        const auto want = static_cast<std::size_t>(
            rng.next_in(spec.active_features_min, spec.active_features_max));
        std::set<int> act;
        while (act.size() < want) {
            const double r = rng.next_double();
            int f;
            if (r < spec.in_band_probability * spec.topic_share)
                f = c.topic[static_cast<std::size_t>(rng.next_below(c.topic.size()))];
            else if (r < spec.in_band_probability)
                f = lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo)));
            else
                f = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.feature_dim)));
            act.insert(f);
        }
        active[static_cast<std::size_t>(u)].assign(act.begin(), act.end());
    }

    // unique citation-style numeric ids
    std::vector<std::string> name(static_cast<std::size_t>(n));
    {
        std::unordered_set<long> used;
        for (int u = 0; u < n; ++u) {
            long id = 0;
            do {
                id = rng.next_in(10000, 9999999);
            } while (!used.insert(id).second);
            name[static_cast<std::size_t>(u)] = std::to_string(id);
        }
    }

    // rotate written labels among a random node subset: every class keeps its
    // exact size, but a share of nodes now carries a label their features and
    // wiring do not match
    std::vector<int> written = label;
    if (spec.label_noise > 0.0) {
        auto picks = shuffled_indices(n, rng);
        picks.resize(std::min<std::size_t>(
            picks.size(), static_cast<std::size_t>(spec.label_noise * n + 0.5)));
        if (picks.size() >= 2)
            for (std::size_t i = 0; i < picks.size(); ++i)
                written[static_cast<std::size_t>(picks[i])] =
                    label[static_cast<std::size_t>(picks[(i + 1) % picks.size()])];
    }

    std::filesystem::create_directories(dir);
    BenchmarkFiles files;
    files.content_path = dir + "/" + spec.name + ".content";
    files.cites_path = dir + "/" + spec.name + ".cites";

    {
        std::ofstream out(files.content_path);
        if (!out) throw std::runtime_error("cannot write " + files.content_path);
        std::vector<int> order = shuffled_indices(n, rng);
        std::string row;
        for (int u : order) {
            row.clear();
            row += name[static_cast<std::size_t>(u)];
            const auto& act = active[static_cast<std::size_t>(u)];
            std::size_t next = 0;
            for (int f = 0; f < spec.feature_dim; ++f) {
                row += '\t';
                if (next < act.size() && act[next] == f) {
                    row += '1';
                    ++next;
                } else {
                    row += '0';
                }
            }
            row += '\t';
            row += spec.class_names[static_cast<std::size_t>(written[static_cast<std::size_t>(u)])];
            row += '\n';
            out << row;
        }
    }
    {
        std::ofstream out(files.cites_path);
        if (!out) throw std::runtime_error("cannot write " + files.cites_path);
        std::vector<std::pair<int, int>> list(edges.begin(), edges.end());
        fisher_yates(list, rng);
        for (auto [u, v] : list) {
            if (rng.next_below(2) == 0) std::swap(u, v); // random citation direction
            out << name[static_cast<std::size_t>(u)] << '\t' << name[static_cast<std::size_t>(v)]
                << '\n';
        }
    }
    return files;
}

} // namespace emlouv::synthetic
