#include "emlouv/merging.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <tuple>

#include "emlouv/union_find.hpp"

namespace emlouv {

namespace {
constexpr double kNormFloor = 1e-12;
}

void MergeConfig::validate() const {
    if (!(t_initial > 0.0) || t_initial > 2.0)
        throw std::invalid_argument("t_initial must be in (0, 2]");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (!(t_min >= 0.0)) throw std::invalid_argument("t_min must be >= 0");
    if (t_min > t_initial) throw std::invalid_argument("t_min must not exceed t_initial");
    if (it_max < 1) throw std::invalid_argument("it_max must be >= 1");
    if (target_communities < 0) throw std::invalid_argument("target_communities must be >= 0");
    if (outer_max < 1) throw std::invalid_argument("outer_max must be >= 1");
}

const char* to_string(MergeStop reason) {
    switch (reason) {
    case MergeStop::threshold_floor: return "threshold_floor";
    case MergeStop::iteration_cap: return "iteration_cap";
    case MergeStop::target_reached: return "target_reached";
    case MergeStop::converged: return "converged";
    }
    return "unknown";
}

double community_pair_distance(const EmbeddingMatrix& embeddings, std::span<const int> members_i,
                               const Centroid& centroid_j) {
    if (members_i.empty()) throw std::invalid_argument("community has no members");
    double sum = 0.0;
    for (int m : members_i)
        sum += cosine_distance(embeddings.row(static_cast<std::size_t>(m)), centroid_j.vector);
    return sum / static_cast<double>(members_i.size());
}

MergePassResult merge_pass(const Partition& partition, const EmbeddingMatrix& embeddings,
                           double threshold) {
    const int n = partition.size();
    if (static_cast<std::size_t>(n) != embeddings.rows)
        throw std::invalid_argument("partition size does not match embedding rows");
    partition.validate(n);

    const int k = partition.community_count;
    const std::size_t dim = embeddings.dim;

    // Mean member-to-centroid distance in direction i -> j factors through the
    // sum of i's unit rows: mean_m (1 - x_m.c_j / (|x_m||c_j|)) =
    // 1 - (sum_m x_m/|x_m|) . c_j / (count_i |c_j|). Degenerate rows count as
    // the neutral distance 1 (they drop out of the unit sum).
    std::vector<double> raw(static_cast<std::size_t>(k) * dim, 0.0);  // member sums, for centroids
    std::vector<double> unit(static_cast<std::size_t>(k) * dim, 0.0); // unit-row sums
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(partition.assignment[static_cast<std::size_t>(i)]);
        const auto row = embeddings.row(static_cast<std::size_t>(i));
        double sq = 0.0;
        for (double v : row) sq += v * v;
        const double norm = std::sqrt(sq);
        double* rp = raw.data() + c * dim;
        double* up = unit.data() + c * dim;
        for (std::size_t f = 0; f < dim; ++f) rp[f] += row[f];
        if (norm >= kNormFloor)
            for (std::size_t f = 0; f < dim; ++f) up[f] += row[f] / norm;
        ++cnt[c];
    }
    std::vector<double> raw_norm(static_cast<std::size_t>(k), 0.0);
    for (int c = 0; c < k; ++c) {
        const double* rp = raw.data() + static_cast<std::size_t>(c) * dim;
        double sq = 0.0;
        for (std::size_t f = 0; f < dim; ++f) sq += rp[f] * rp[f];
        raw_norm[static_cast<std::size_t>(c)] = std::sqrt(sq);
    }

    auto directed = [&](int i, int j) {
        // centroid_j = raw_j / cnt_j; its norm decides degeneracy
        const auto si = static_cast<std::size_t>(i);
        const auto sj = static_cast<std::size_t>(j);
        if (raw_norm[sj] / static_cast<double>(cnt[sj]) < kNormFloor) return 1.0;
        const double* up = unit.data() + si * dim;
        const double* rp = raw.data() + sj * dim;
        double dot = 0.0;
        for (std::size_t f = 0; f < dim; ++f) dot += up[f] * rp[f];
        return 1.0 - dot / (static_cast<double>(cnt[si]) * raw_norm[sj]);
    };

    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const double d = std::min(directed(i, j), directed(j, i));
            if (d < threshold) pairs.emplace_back(d, i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    UnionFind uf(k);
    int merges = 0;
    for (const auto& [d, i, j] : pairs)
        if (uf.unite(i, j)) ++merges;

    // dense ids in ascending old-community order
    std::vector<int> dense(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int c = 0; c < k; ++c) {
        const int r = uf.find(c);
        if (dense[static_cast<std::size_t>(r)] == -1) dense[static_cast<std::size_t>(r)] = next++;
    }
    MergePassResult out;
    out.partition.assignment.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.partition.assignment[static_cast<std::size_t>(i)] = dense[static_cast<std::size_t>(
            uf.find(partition.assignment[static_cast<std::size_t>(i)]))];
    out.partition.community_count = next;
    out.merges = merges;
    return out;
}

namespace {

struct InnerOutcome {
    Partition partition;
    MergeStop stop = MergeStop::iteration_cap;
    int total_merges = 0;
};

InnerOutcome run_inner(Partition current, const EmbeddingMatrix& embeddings,
                       const MergeConfig& config, MergeTrace& trace) {
    InnerOutcome out;
    double threshold = config.t_initial;
    MergeStop stop = MergeStop::iteration_cap; // if the pass budget runs out
    for (int it = 0; it < config.it_max; ++it) {
        MergePassResult pass = merge_pass(current, embeddings, threshold);
        current = std::move(pass.partition);
        out.total_merges += pass.merges;
        trace.records.push_back({threshold, pass.merges, current.community_count});
        if (config.has_target() && current.community_count <= config.target_communities) {
            stop = MergeStop::target_reached;
            break;
        }
        if (pass.merges == 0) {
            threshold -= config.alpha;
            if (threshold < config.t_min) {
                stop = MergeStop::threshold_floor;
                break;
            }
        }
    }
    out.partition = std::move(current);
    out.stop = stop;
    return out;
}

} // namespace

MergeResult iterative_merge(const Partition& partition, const EmbeddingMatrix& embeddings,
                            const MergeConfig& config) {
    config.validate();
    const int n = partition.size();
    if (static_cast<std::size_t>(n) != embeddings.rows)
        throw std::invalid_argument("partition size does not match embedding rows");
    partition.validate(n);

    MergeResult out;
    out.partition = partition;
    out.trace.rounds = 0;

    if (!config.has_target()) {
        InnerOutcome inner = run_inner(partition, embeddings, config, out.trace);
        out.partition = std::move(inner.partition);
        out.trace.stop_reason = inner.stop;
        out.trace.rounds = 1;
        return out;
    }

    if (partition.community_count == config.target_communities) {
        out.trace.stop_reason = MergeStop::target_reached;
        return out;
    }
    if (partition.community_count < config.target_communities) {
        std::cerr << "warning: already below the target community count ("
                  << partition.community_count << " < " << config.target_communities
                  << "), nothing to merge\n";
        out.trace.stop_reason = MergeStop::converged;
        return out;
    }

    for (int round = 1; round <= config.outer_max; ++round) {
        out.trace.rounds = round;
        InnerOutcome inner;
        if (round == 1) {
            inner = run_inner(out.partition, embeddings, config, out.trace);
            out.partition = std::move(inner.partition);
        } else {
            // coarsen to one representative row per community: the centroid of
            // its original members, then merge those as singleton units
            const auto groups = out.partition.members();
            const int k = out.partition.community_count;
            EmbeddingMatrix reps(static_cast<std::size_t>(k), embeddings.dim);
            for (int c = 0; c < k; ++c) {
                const Centroid ctr = centroid(embeddings, groups[static_cast<std::size_t>(c)]);
                auto dst = reps.row(static_cast<std::size_t>(c));
                std::copy(ctr.vector.begin(), ctr.vector.end(), dst.begin());
            }
            inner = run_inner(Partition::singletons(k), reps, config, out.trace);
            for (int i = 0; i < n; ++i) {
                auto& slot = out.partition.assignment[static_cast<std::size_t>(i)];
                slot = inner.partition.assignment[static_cast<std::size_t>(slot)];
            }
            out.partition.community_count = inner.partition.community_count;
        }
        out.trace.stop_reason = inner.stop;
        if (inner.stop == MergeStop::target_reached) break;
        // Zero merges is a fixed point only from round 2 on: round 2 swaps the
        // metric from mean member distance to representative centroids, so a
        // dry first round can still make progress. From round 2, an unchanged
        // partition reproduces the same representatives and distances forever.
        if (inner.total_merges == 0 && round >= 2) {
            out.trace.stop_reason = MergeStop::converged;
            break;
        }
        if (round == config.outer_max) out.trace.stop_reason = MergeStop::iteration_cap;
    }
    return out;
}

} // namespace emlouv
