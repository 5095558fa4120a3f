#include <doctest.h>

#include <cmath>
#include <numeric>
#include <tuple>

#include "emlouv/merging.hpp"
#include "helpers.hpp"

using emlouv::Centroid;
using emlouv::community_pair_distance;
using emlouv::EmbeddingMatrix;
using emlouv::iterative_merge;
using emlouv::merge_pass;
using emlouv::MergeConfig;
using emlouv::MergeStop;
using emlouv::Partition;

namespace {

constexpr double kPi = 3.14159265358979323846;

EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    EmbeddingMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return m;
}

EmbeddingMatrix unit_circle(const std::vector<double>& angles_deg) {
    EmbeddingMatrix m(angles_deg.size(), 2);
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
        const double a = angles_deg[i] * kPi / 180.0;
        m.row(i)[0] = std::cos(a);
        m.row(i)[1] = std::sin(a);
    }
    return m;
}

// Three unit vectors with pairwise cosine distances 0.1, 0.9, 0.9.
EmbeddingMatrix distance_triple() {
    const double y2 = std::sqrt(0.19);
    const double y3 = 0.01 / std::sqrt(0.19);
    const double z3 = std::sqrt(1.0 - 0.01 - y3 * y3);
    return from_rows({{1.0, 0.0, 0.0}, {0.9, y2, 0.0}, {0.1, y3, z3}});
}

// Clusters at 0 degrees (three rays theta apart) and around 120 degrees (two
// rays theta apart), theta = acos(0.95): adjacent same-cluster distance is
// 0.05, the cross-cluster distances sit near 1.3.
EmbeddingMatrix two_cluster_rows() {
    const double theta = std::acos(0.95) * 180.0 / kPi;
    return unit_circle({-theta, 0.0, theta, 120.0 - theta / 2.0, 120.0 + theta / 2.0});
}

// Independent single-pass oracle: naive mean-of-cosine distances in both
// directions, pairs below threshold sorted ascending, plain DSU.
std::pair<Partition, int> naive_merge_pass(const Partition& p, const EmbeddingMatrix& emb,
                                           double threshold) {
    const auto groups = p.members();
    const int k = p.community_count;

    std::vector<Centroid> cents;
    for (const auto& g : groups) {
        Centroid c;
        c.vector.assign(emb.dim, 0.0);
        for (int m : g)
            for (std::size_t f = 0; f < emb.dim; ++f) c.vector[f] += emb.row(static_cast<std::size_t>(m))[f];
        for (double& v : c.vector) v /= static_cast<double>(g.size());
        c.member_count = static_cast<int>(g.size());
        cents.push_back(std::move(c));
    }
    auto directed = [&](int i, int j) {
        double s = 0.0;
        for (int m : groups[static_cast<std::size_t>(i)])
            s += emlouv::cosine_distance(emb.row(static_cast<std::size_t>(m)),
                                         cents[static_cast<std::size_t>(j)].vector);
        return s / static_cast<double>(groups[static_cast<std::size_t>(i)].size());
    };

    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double d = std::min(directed(i, j), directed(j, i));
            if (d < threshold) pairs.emplace_back(d, i, j);
        }
    std::sort(pairs.begin(), pairs.end());

    std::vector<int> parent(static_cast<std::size_t>(k));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    int merges = 0;
    for (const auto& [d, i, j] : pairs) {
        const int ri = find(i), rj = find(j);
        if (ri != rj) {
            parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
            ++merges;
        }
    }
    std::vector<int> dense(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int c = 0; c < k; ++c)
        if (dense[static_cast<std::size_t>(find(c))] == -1) dense[static_cast<std::size_t>(find(c))] = next++;

    Partition out;
    out.assignment.resize(p.assignment.size());
    for (std::size_t i = 0; i < p.assignment.size(); ++i)
        out.assignment[i] = dense[static_cast<std::size_t>(find(p.assignment[i]))];
    out.community_count = next;
    return {out, merges};
}

} // namespace

TEST_CASE("community pair distance basics") {
    const auto emb = from_rows({{1, 0}, {1, 0}, {0, 1}});
    Centroid c;
    c.vector = {1, 0};
    c.member_count = 1;

    const int same[] = {0, 1};
    CHECK(community_pair_distance(emb, same, c) == 0.0);
    const int ortho[] = {2};
    CHECK(community_pair_distance(emb, ortho, c) == 1.0);
    const int mixed[] = {0, 2}; // distances {0, 1} average to 0.5
    CHECK(community_pair_distance(emb, mixed, c) == 0.5);
    CHECK_THROWS_AS((void)community_pair_distance(emb, std::span<const int>{}, c),
                    std::invalid_argument);
}

TEST_CASE("merge pass joins identical centroids and respects the threshold") {
    const auto emb = from_rows({{1, 0}, {1, 0}});
    const auto merged = merge_pass(Partition::singletons(2), emb, 0.5);
    CHECK(merged.partition.community_count == 1);
    CHECK(merged.merges == 1);

    const auto apart = from_rows({{1, 0}, {0, 1}});
    const auto unchanged = merge_pass(Partition::singletons(2), apart, 0.5);
    CHECK(unchanged.partition.community_count == 2);
    CHECK(unchanged.merges == 0);
    CHECK(unchanged.partition.assignment == std::vector<int>{0, 1});
}

TEST_CASE("merge pass on the constructed distance triple") {
    // pairwise distances: d(0,1) = 0.1, d(0,2) = d(1,2) = 0.9
    const auto emb = distance_triple();
    CHECK(emlouv::cosine_distance(emb.row(0), emb.row(1)) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(emlouv::cosine_distance(emb.row(0), emb.row(2)) == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(emlouv::cosine_distance(emb.row(1), emb.row(2)) == doctest::Approx(0.9).epsilon(1e-9));

    const auto res = merge_pass(Partition::singletons(3), emb, 0.2);
    CHECK(res.merges == 1);
    CHECK(res.partition.community_count == 2);
    CHECK(res.partition.assignment[0] == res.partition.assignment[1]);
    CHECK(res.partition.assignment[2] != res.partition.assignment[0]);
}

TEST_CASE("nearby pairs chain through one pass") {
    // angles {0, theta, 2 theta}, cos(theta) = 0.97: adjacent distance 0.03
    // is under the threshold, the end-to-end distance 0.1182 is not, yet the
    // union-find chains all three together.
    const double theta = std::acos(0.97) * 180.0 / kPi;
    const auto emb = unit_circle({0.0, theta, 2.0 * theta});
    const auto res = merge_pass(Partition::singletons(3), emb, 0.05);
    CHECK(res.merges == 2);
    CHECK(res.partition.community_count == 1);
}

TEST_CASE("merge pass matches the naive oracle on random inputs") {
    emlouv::Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 6 + static_cast<int>(rng.next_below(10));
        const std::size_t dim = 2 + rng.next_below(4);
        EmbeddingMatrix emb(static_cast<std::size_t>(n), dim);
        for (double& v : emb.data) v = rng.next_double() - 0.35; // mixed-sign rows
        const Partition p = testutil::random_partition(n, 5, rng);
        const double threshold = 0.05 + 0.6 * rng.next_double();

        const auto fast = merge_pass(p, emb, threshold);
        const auto [slow, slow_merges] = naive_merge_pass(p, emb, threshold);
        CHECK(fast.merges == slow_merges);
        CHECK(fast.partition.community_count == slow.community_count);
        CHECK(fast.partition.assignment == slow.assignment);
    }
}

TEST_CASE("merge pass validates its inputs") {
    const auto emb = from_rows({{1, 0}, {0, 1}});
    CHECK_THROWS_AS((void)merge_pass(Partition::singletons(3), emb, 0.5), std::invalid_argument);
}

TEST_CASE("merge config validation") {
    MergeConfig ok;
    CHECK_NOTHROW(ok.validate());
    MergeConfig c = ok;
    c.t_initial = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.t_initial = 2.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.t_min = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.t_min = 0.9; // above t_initial 0.5
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.it_max = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.target_communities = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ok;
    c.outer_max = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("unsupervised merging stops at the threshold floor") {
    const auto emb = from_rows({{1, 0}, {0, 1}}); // distance 1, nothing merges
    MergeConfig cfg;
    cfg.t_initial = 0.5;
    cfg.alpha = 0.05;
    cfg.t_min = 0.5; // first zero-merge pass decays straight through the floor
    const auto res = iterative_merge(Partition::singletons(2), emb, cfg);
    CHECK(res.partition.community_count == 2);
    CHECK(res.trace.stop_reason == MergeStop::threshold_floor);
    CHECK(res.trace.rounds == 1);
    REQUIRE(res.trace.records.size() == 1);
    CHECK(res.trace.records[0].threshold == 0.5);
    CHECK(res.trace.records[0].merges == 0);
    CHECK(res.trace.records[0].community_count == 2);
}

TEST_CASE("unsupervised merging resolves the two-cluster fixture") {
    const auto emb = two_cluster_rows();
    MergeConfig cfg;
    cfg.t_initial = 0.1;
    cfg.alpha = 0.05;
    cfg.t_min = 0.1;
    const auto res = iterative_merge(Partition::singletons(5), emb, cfg);
    CHECK(res.partition.community_count == 2);
    const auto& a = res.partition.assignment;
    CHECK(a[0] == a[1]);
    CHECK(a[1] == a[2]);
    CHECK(a[3] == a[4]);
    CHECK(a[0] != a[3]);
    CHECK(res.trace.stop_reason == MergeStop::threshold_floor);
}

TEST_CASE("single pass community count falls as the threshold rises") {
    const auto emb = two_cluster_rows();
    const auto at_low = merge_pass(Partition::singletons(5), emb, 0.03);
    const auto at_mid = merge_pass(Partition::singletons(5), emb, 0.1);
    const auto at_high = merge_pass(Partition::singletons(5), emb, 1.5);
    CHECK(at_low.partition.community_count == 5);
    CHECK(at_mid.partition.community_count == 2);
    CHECK(at_high.partition.community_count == 1);
}

TEST_CASE("targeted merging pre-checks") {
    const auto emb = two_cluster_rows();
    Partition p;
    p.assignment = {0, 0, 0, 1, 1};
    p.community_count = 2;

    SUBCASE("already at the target") {
        MergeConfig cfg;
        cfg.target_communities = 2;
        const auto res = iterative_merge(p, emb, cfg);
        CHECK(res.trace.stop_reason == MergeStop::target_reached);
        CHECK(res.trace.rounds == 0);
        CHECK(res.trace.records.empty());
        CHECK(res.partition.assignment == p.assignment);
    }
    SUBCASE("already below the target") {
        MergeConfig cfg;
        cfg.target_communities = 4;
        const auto res = iterative_merge(p, emb, cfg);
        CHECK(res.trace.stop_reason == MergeStop::converged);
        CHECK(res.trace.rounds == 0);
        CHECK(res.partition.community_count == 2);
    }
}

TEST_CASE("targeted merging reaches the target inside round one") {
    const auto emb = two_cluster_rows();
    MergeConfig cfg;
    cfg.t_initial = 0.1;
    cfg.alpha = 0.05;
    cfg.t_min = 0.0;
    cfg.target_communities = 2;
    const auto res = iterative_merge(Partition::singletons(5), emb, cfg);
    CHECK(res.partition.community_count == 2);
    CHECK(res.trace.stop_reason == MergeStop::target_reached);
    CHECK(res.trace.rounds == 1);
}

TEST_CASE("round two switches to representative centroids and can finish the job") {
    // Communities {0,1} fan +-40 degrees and {2,3} fan +-50 degrees around the
    // same axis: member means to the other centroid are 0.234 and 0.357, both
    // over the threshold, so round one is a dry run; the representative
    // centroids coincide in direction (distance 0) and round two merges them.
    const auto emb = unit_circle({40.0, -40.0, 50.0, -50.0});
    Partition p;
    p.assignment = {0, 0, 1, 1};
    p.community_count = 2;

    MergeConfig cfg;
    cfg.t_initial = 0.2;
    cfg.alpha = 0.05;
    cfg.t_min = 0.2;
    cfg.target_communities = 1;
    cfg.outer_max = 5;
    const auto res = iterative_merge(p, emb, cfg);
    CHECK(res.partition.community_count == 1);
    CHECK(res.trace.stop_reason == MergeStop::target_reached);
    CHECK(res.trace.rounds == 2);
}

TEST_CASE("targeted merging reports an honest stop when the target is unreachable") {
    const auto emb = two_cluster_rows();

    SUBCASE("outer budget of one round") {
        MergeConfig cfg;
        cfg.t_initial = 0.1;
        cfg.alpha = 0.05;
        cfg.t_min = 0.1;
        cfg.target_communities = 1;
        cfg.outer_max = 1;
        const auto res = iterative_merge(Partition::singletons(5), emb, cfg);
        CHECK(res.partition.community_count == 2);
        CHECK(res.trace.stop_reason == MergeStop::iteration_cap);
        CHECK(res.trace.rounds == 1);
    }
    SUBCASE("converges once representatives stop merging") {
        MergeConfig cfg;
        cfg.t_initial = 0.1;
        cfg.alpha = 0.05;
        cfg.t_min = 0.1;
        cfg.target_communities = 1;
        cfg.outer_max = 6;
        const auto res = iterative_merge(Partition::singletons(5), emb, cfg);
        CHECK(res.partition.community_count == 2); // cross-cluster reps stay ~1.3 apart
        CHECK(res.trace.stop_reason == MergeStop::converged);
        CHECK(res.trace.rounds == 2);
    }
}

TEST_CASE("merge trace invariants hold on random inputs") {
    emlouv::Rng rng(555);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 8 + static_cast<int>(rng.next_below(12));
        EmbeddingMatrix emb(static_cast<std::size_t>(n), 3);
        for (double& v : emb.data) v = rng.next_double() - 0.3;

        MergeConfig cfg;
        cfg.t_initial = 0.1 + 0.5 * rng.next_double();
        cfg.alpha = 0.02 + 0.1 * rng.next_double();
        cfg.t_min = cfg.t_initial * rng.next_double();
        cfg.it_max = 1 + static_cast<int>(rng.next_below(12));
        if (trial % 2 == 0) {
            cfg.target_communities = 1 + static_cast<int>(rng.next_below(4));
            cfg.outer_max = 1 + static_cast<int>(rng.next_below(4));
        }

        const auto res = iterative_merge(Partition::singletons(n), emb, cfg);
        res.partition.validate(n);
        CHECK(res.trace.records.size() <=
              static_cast<std::size_t>(cfg.it_max) *
                  static_cast<std::size_t>(cfg.has_target() ? cfg.outer_max : 1));
        for (std::size_t i = 0; i + 1 < res.trace.records.size(); ++i)
            CHECK(res.trace.records[i + 1].community_count <= res.trace.records[i].community_count);
        if (!res.trace.records.empty())
            CHECK(res.trace.records.back().community_count >= res.partition.community_count);

        const auto again = iterative_merge(Partition::singletons(n), emb, cfg);
        CHECK(again.partition.assignment == res.partition.assignment);
        CHECK(again.trace.records.size() == res.trace.records.size());
    }
}

TEST_CASE("iterative merge validates sizes") {
    const auto emb = from_rows({{1, 0}, {0, 1}});
    MergeConfig cfg;
    CHECK_THROWS_AS((void)iterative_merge(Partition::singletons(3), emb, cfg),
                    std::invalid_argument);
}
