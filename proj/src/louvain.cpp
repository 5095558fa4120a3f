#include "emlouv/louvain.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "emlouv/random.hpp"

namespace emlouv {

namespace {

constexpr int kMaxSweepsPerLevel = 64; // safety net; sweeps normally stop when no node moves
constexpr double kNormFloor = 1e-12;

// Per-community embedding bookkeeping for the combined objective. Communities
// carry the *sum* of their original members' rows plus the member count;
// cosine is scale invariant, so sums stand in for centroids.
struct CommunitySums {
    std::size_t dim = 0;
    std::vector<double> data; // community-major sums
    std::vector<int> counts;

    void reset(const EmbeddingMatrix& node_sums, std::span<const int> node_counts) {
        dim = node_sums.dim;
        data = node_sums.data; // singleton start: community id == node id
        counts.assign(node_counts.begin(), node_counts.end());
    }

    double* sum(int c) { return data.data() + static_cast<std::size_t>(c) * dim; }
    const double* sum(int c) const { return data.data() + static_cast<std::size_t>(c) * dim; }

    void detach(int c, std::span<const double> s, int cnt) {
        counts[static_cast<std::size_t>(c)] -= cnt;
        double* p = sum(c);
        if (counts[static_cast<std::size_t>(c)] == 0) {
            std::fill(p, p + dim, 0.0); // exact empty, no float residue
        } else {
            for (std::size_t f = 0; f < dim; ++f) p[f] -= s[f];
        }
    }

    void attach(int c, std::span<const double> s, int cnt) {
        counts[static_cast<std::size_t>(c)] += cnt;
        double* p = sum(c);
        for (std::size_t f = 0; f < dim; ++f) p[f] += s[f];
    }

    // Cosine distance between the node and community c's current centroid.
    // The member count cancels out of cosine, so the sum stands in directly.
    double distance_to(std::span<const double> u, double u_sq, int c) const {
        const double* p = sum(c);
        double dot = 0.0, c_sq = 0.0;
        for (std::size_t f = 0; f < dim; ++f) {
            dot += u[f] * p[f];
            c_sq += p[f] * p[f];
        }
        const double nu = std::sqrt(u_sq);
        const double nc = std::sqrt(c_sq);
        if (nu < kNormFloor || nc < kNormFloor) return 1.0;
        double cv = dot / (nu * nc);
        if (cv > 1.0) cv = 1.0;
        if (cv < -1.0) cv = -1.0;
        return 1.0 - cv;
    }
};

// One round of local moves over the level graph. Returns whether any node
// changed community. Visit order is shuffled once per level and reused by
// every sweep, so a given seed fixes the full trajectory.
bool one_level(const Graph& g, LocalMoveState& state, const EmbeddingMatrix* node_sums,
               std::span<const int> node_counts, CommunitySums* comm, const LouvainConfig& cfg,
               Rng& rng, int level, const MoveObserver& observer) {
    const int n = g.node_count();
    const std::vector<int> order = shuffled_indices(n, rng);
    const bool combined = comm != nullptr;

    std::vector<double> neigh_weight(static_cast<std::size_t>(n), 0.0);
    std::vector<int> stamp(static_cast<std::size_t>(n), -1);
    std::vector<int> cand;
    cand.reserve(32);
    int visit = 0;
    bool any_move = false;

    for (int sweep = 0; sweep < kMaxSweepsPerLevel; ++sweep) {
        bool moved = false;
        for (int u : order) {
            const int old_c = state.community_of(u);
            ++visit;

            cand.clear();
            cand.push_back(old_c);
            stamp[static_cast<std::size_t>(old_c)] = visit;
            neigh_weight[static_cast<std::size_t>(old_c)] = 0.0;
            for (const auto& e : g.neighbors(u)) {
                const int c = state.community_of(e.neighbor);
                if (stamp[static_cast<std::size_t>(c)] != visit) {
                    stamp[static_cast<std::size_t>(c)] = visit;
                    neigh_weight[static_cast<std::size_t>(c)] = 0.0;
                    cand.push_back(c);
                }
                neigh_weight[static_cast<std::size_t>(c)] += e.weight;
            }
            std::sort(cand.begin(), cand.end()); // ties go to the lowest community id

            state.detach(u);
            std::span<const double> u_sum;
            double u_sq = 0.0;
            if (combined) {
                u_sum = node_sums->row(static_cast<std::size_t>(u));
                comm->detach(old_c, u_sum, node_counts[static_cast<std::size_t>(u)]);
                for (double v : u_sum) u_sq += v * v;
            }

            const double gain_stay =
                state.insertion_gain_with(neigh_weight[static_cast<std::size_t>(old_c)], u, old_c);

            int best_c = old_c;
            double best_net = cfg.min_gain; // a move must beat staying by min_gain

            if (!combined) {
                for (int c : cand) {
                    if (c == old_c) continue;
                    const double net =
                        state.insertion_gain_with(neigh_weight[static_cast<std::size_t>(c)], u, c) -
                        gain_stay;
                    if (net > best_net) {
                        best_net = net;
                        best_c = c;
                    }
                }
            } else {
                // A move must clear the same modularity bar as the baseline;
                // among the candidates that do, the combined score picks the
                // target, letting embedding proximity override the raw
                // modularity preference. The gate matters: the score takes
                // |delta Q|, so without it a modularity-destroying move could
                // outrank an improving one, and a "stay" option scored by its
                // own centroid distance pins every singleton in place
                // (distance 0 is unbeatable). Score ties break on the higher
                // net gain, then the lower community id via the scan order.
                double best_score = 0.0;
                bool found = false;
                for (int c : cand) {
                    if (c == old_c) continue;
                    const double net =
                        state.insertion_gain_with(neigh_weight[static_cast<std::size_t>(c)], u, c) -
                        gain_stay;
                    if (!(net > cfg.min_gain)) continue;
                    const double score =
                        combined_objective(net, comm->distance_to(u_sum, u_sq, c), cfg);
                    if (!found || score > best_score || (score == best_score && net > best_net)) {
                        found = true;
                        best_score = score;
                        best_net = net;
                        best_c = c;
                    }
                }
            }

            state.attach(u, best_c);
            if (combined) comm->attach(best_c, u_sum, node_counts[static_cast<std::size_t>(u)]);

            if (best_c != old_c) {
                moved = true;
                any_move = true;
                if (observer) {
                    MoveEvent ev{level, u, old_c, best_c, best_net};
                    observer(g, state.assignment(), ev);
                }
            }
        }
        if (!moved) break;
    }
    return any_move;
}

} // namespace

void LouvainConfig::validate() const {
    if (!(log_base_p > 1.0)) throw std::invalid_argument("log_base_p must be > 1");
    if (!(distance_epsilon > 0.0)) throw std::invalid_argument("distance_epsilon must be > 0");
    if (max_levels < 1) throw std::invalid_argument("max_levels must be >= 1");
    if (!(min_gain >= 0.0)) throw std::invalid_argument("min_gain must be >= 0");
}

double modularity(const Graph& graph, const Partition& partition) {
    partition.validate(graph.node_count());
    const double two_m = graph.total_weight();
    if (two_m <= 0.0) {
        std::cerr << "warning: modularity of a zero-weight graph, returning 0\n";
        return 0.0;
    }
    std::vector<double> in(static_cast<std::size_t>(partition.community_count), 0.0);
    std::vector<double> tot(static_cast<std::size_t>(partition.community_count), 0.0);
    for (int u = 0; u < graph.node_count(); ++u) {
        const int cu = partition.assignment[static_cast<std::size_t>(u)];
        tot[static_cast<std::size_t>(cu)] += graph.degree(u);
        in[static_cast<std::size_t>(cu)] += 2.0 * graph.self_loop(u); // A_uu
        for (const auto& e : graph.neighbors(u))
            if (partition.assignment[static_cast<std::size_t>(e.neighbor)] == cu)
                in[static_cast<std::size_t>(cu)] += e.weight; // visited from both ends
    }
    double q = 0.0;
    for (int c = 0; c < partition.community_count; ++c) {
        const double frac = tot[static_cast<std::size_t>(c)] / two_m;
        q += in[static_cast<std::size_t>(c)] / two_m - frac * frac;
    }
    return q;
}

LocalMoveState::LocalMoveState(const Graph& graph, const Partition& initial)
    : graph_(graph), assignment_(initial.assignment),
      tot_(static_cast<std::size_t>(initial.community_count), 0.0),
      m_(graph.total_weight() / 2.0) {
    initial.validate(graph.node_count());
    if (m_ <= 0.0) throw std::invalid_argument("local moves need a graph with positive weight");
    for (int u = 0; u < graph.node_count(); ++u)
        tot_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(u)])] += graph.degree(u);
}

void LocalMoveState::detach(int node) {
    const int c = assignment_[static_cast<std::size_t>(node)];
    tot_[static_cast<std::size_t>(c)] -= graph_.degree(node);
    assignment_[static_cast<std::size_t>(node)] = -1;
}

void LocalMoveState::attach(int node, int community) {
    assignment_[static_cast<std::size_t>(node)] = community;
    tot_[static_cast<std::size_t>(community)] += graph_.degree(node);
}

double LocalMoveState::insertion_gain(int node, int community) const {
    double k_in = 0.0;
    for (const auto& e : graph_.neighbors(node))
        if (assignment_[static_cast<std::size_t>(e.neighbor)] == community) k_in += e.weight;
    return insertion_gain_with(k_in, node, community);
}

double LocalMoveState::insertion_gain_with(double k_node_in, int node, int community) const {
    const double k = graph_.degree(node);
    return k_node_in / m_ - tot_[static_cast<std::size_t>(community)] * k / (2.0 * m_ * m_);
}

double combined_objective(double delta_q, double distance, const LouvainConfig& config) {
    const double inv_log_p = 1.0 / std::log(config.log_base_p);
    const double q_term = std::log1p(std::fabs(delta_q));
    const double d_term = std::log1p(1.0 / std::max(std::fabs(distance), config.distance_epsilon));
    return (q_term + d_term) * inv_log_p;
}

LouvainResult run_louvain(const Graph& graph, const EmbeddingMatrix* embeddings,
                          const LouvainConfig& config, const MoveObserver& observer) {
    config.validate();
    const int n0 = graph.node_count();
    const bool combined = config.objective == LouvainConfig::Objective::combined;
    if (combined && embeddings == nullptr)
        throw std::invalid_argument("the combined objective needs an embedding matrix");
    if (embeddings && static_cast<int>(embeddings->rows) != n0)
        throw std::invalid_argument("embedding rows (" + std::to_string(embeddings->rows) +
                                    ") do not match node count (" + std::to_string(n0) + ")");

    LouvainResult out;
    out.partition = Partition::singletons(n0);

    auto fill_community_embeddings = [&]() {
        if (!embeddings || n0 == 0) return;
        EmbeddingMatrix ce(static_cast<std::size_t>(out.partition.community_count), embeddings->dim);
        std::vector<int> cnt(static_cast<std::size_t>(out.partition.community_count), 0);
        for (int i = 0; i < n0; ++i) {
            const auto c = static_cast<std::size_t>(out.partition.assignment[static_cast<std::size_t>(i)]);
            auto dst = ce.row(c);
            auto src = embeddings->row(static_cast<std::size_t>(i));
            for (std::size_t f = 0; f < ce.dim; ++f) dst[f] += src[f];
            ++cnt[c];
        }
        for (std::size_t c = 0; c < ce.rows; ++c) {
            auto r = ce.row(c);
            for (double& v : r) v /= static_cast<double>(cnt[c]);
        }
        out.community_embeddings = std::move(ce);
    };

    if (n0 == 0) return out;
    if (graph.total_weight() <= 0.0) {
        out.modularity = modularity(graph, out.partition); // warns, yields 0
        fill_community_embeddings();
        return out;
    }

    std::vector<int> node_to_comm(static_cast<std::size_t>(n0));
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

    Graph level_storage;
    const Graph* cur = &graph;

    EmbeddingMatrix node_sums;
    std::vector<int> node_counts;
    CommunitySums comm;
    if (combined) {
        node_sums = *embeddings;
        node_counts.assign(static_cast<std::size_t>(n0), 1);
    }

    Rng rng(config.seed);
    for (int level = 0; level < config.max_levels; ++level) {
        LocalMoveState state(*cur, Partition::singletons(cur->node_count()));
        if (combined) comm.reset(node_sums, node_counts);
        const bool any_move = one_level(*cur, state, combined ? &node_sums : nullptr, node_counts,
                                        combined ? &comm : nullptr, config, rng, level, observer);
        if (!any_move) break;

        LevelResult lr;
        lr.partition = Partition::from_labels(state.assignment());
        lr.modularity = modularity(*cur, lr.partition);
        lr.levels_so_far = level + 1;
        out.levels.push_back(std::move(lr));
        const Partition& local = out.levels.back().partition;

        for (int i = 0; i < n0; ++i) {
            auto& slot = node_to_comm[static_cast<std::size_t>(i)];
            slot = local.assignment[static_cast<std::size_t>(slot)];
        }
        if (local.community_count == cur->node_count()) break; // nothing coarsened

        Graph next = collapse(*cur, local);
        if (combined) {
            EmbeddingMatrix ns(static_cast<std::size_t>(local.community_count), node_sums.dim);
            std::vector<int> nc(static_cast<std::size_t>(local.community_count), 0);
            for (int u = 0; u < cur->node_count(); ++u) {
                const auto c = static_cast<std::size_t>(local.assignment[static_cast<std::size_t>(u)]);
                auto dst = ns.row(c);
                auto src = node_sums.row(static_cast<std::size_t>(u));
                for (std::size_t f = 0; f < ns.dim; ++f) dst[f] += src[f];
                nc[c] += node_counts[static_cast<std::size_t>(u)];
            }
            node_sums = std::move(ns);
            node_counts = std::move(nc);
        }
        level_storage = std::move(next);
        cur = &level_storage;
    }

    out.partition = Partition::from_labels(node_to_comm);
    out.modularity = modularity(graph, out.partition);
    fill_community_embeddings();
    return out;
}

} // namespace emlouv
