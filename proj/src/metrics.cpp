#include "emlouv/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "emlouv/louvain.hpp"
#include "emlouv/random.hpp"

namespace emlouv {

IntraAccuracy intra_accuracy(std::span<const int> community_members, std::span<const int> labels) {
    if (community_members.empty()) throw std::invalid_argument("empty community");
    int max_label = 0;
    for (int m : community_members) {
        const int l = labels[static_cast<std::size_t>(m)];
        if (l < 0) throw std::invalid_argument("negative class label");
        max_label = std::max(max_label, l);
    }
    std::vector<int> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (int m : community_members) ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(m)])];

    int best = 0; // ties go to the lowest class id
    for (int l = 1; l <= max_label; ++l)
        if (counts[static_cast<std::size_t>(l)] > counts[static_cast<std::size_t>(best)]) best = l;

    IntraAccuracy out;
    out.majority_class = best;
    out.accuracy = static_cast<double>(counts[static_cast<std::size_t>(best)]) /
                   static_cast<double>(community_members.size());
    return out;
}

EvalReport evaluate_partition(const Partition& partition, std::span<const int> labels,
                              const Graph* graph) {
    const int n = partition.size();
    if (static_cast<std::size_t>(n) != labels.size())
        throw std::invalid_argument("label count does not match partition size");
    partition.validate(n);

    EvalReport report;
    report.community_count = partition.community_count;
    report.per_community.reserve(static_cast<std::size_t>(partition.community_count));

    const auto groups = partition.members();
    double sum = 0.0, weighted = 0.0;
    for (int c = 0; c < partition.community_count; ++c) {
        const auto& g = groups[static_cast<std::size_t>(c)];
        const IntraAccuracy ia = intra_accuracy(g, labels);
        report.per_community.push_back(
            {c, static_cast<int>(g.size()), ia.majority_class, ia.accuracy});
        sum += ia.accuracy;
        weighted += ia.accuracy * static_cast<double>(g.size());
    }
    report.inter_accuracy =
        partition.community_count > 0 ? sum / static_cast<double>(partition.community_count) : 0.0;
    report.size_weighted_accuracy = n > 0 ? weighted / static_cast<double>(n) : 0.0;
    if (graph) {
        if (graph->node_count() != n)
            throw std::invalid_argument("graph node count does not match partition size");
        report.modularity = modularity(*graph, partition);
    }
    return report;
}

std::vector<ClassDistanceRow> hypothesis_check(const LabeledDataset& dataset,
                                               const EmbeddingMatrix& embeddings,
                                               int nodes_per_class, int samples,
                                               std::uint64_t seed) {
    if (nodes_per_class < 1) throw std::invalid_argument("nodes_per_class must be >= 1");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const int n = dataset.graph.node_count();
    if (static_cast<std::size_t>(n) != embeddings.rows)
        throw std::invalid_argument("embedding rows do not match dataset size");

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(dataset.class_count));
    for (int i = 0; i < n; ++i)
        by_class[static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(i)])].push_back(i);
    for (int k = 0; k < dataset.class_count; ++k)
        if (by_class[static_cast<std::size_t>(k)].size() < static_cast<std::size_t>(nodes_per_class))
            throw std::invalid_argument("class '" + dataset.class_names[static_cast<std::size_t>(k)] +
                                        "' has only " +
                                        std::to_string(by_class[static_cast<std::size_t>(k)].size()) +
                                        " members, need " + std::to_string(nodes_per_class));

    Rng rng(seed);
    std::vector<ClassDistanceRow> rows;
    rows.reserve(static_cast<std::size_t>(dataset.class_count));

    auto mean_to = [&](std::span<const int> probes, const Centroid& c) {
        if (probes.empty()) return 0.0;
        double s = 0.0;
        for (int p : probes)
            s += cosine_distance(embeddings.row(static_cast<std::size_t>(p)), c.vector);
        return s / static_cast<double>(probes.size());
    };

    for (int k = 0; k < dataset.class_count; ++k) {
        // synthetic community: a seeded sample of the class
        std::vector<int> community = by_class[static_cast<std::size_t>(k)];
        fisher_yates(community, rng);
        community.resize(static_cast<std::size_t>(nodes_per_class));
        const Centroid c = centroid(embeddings, community);

        std::vector<int> same = by_class[static_cast<std::size_t>(k)];
        fisher_yates(same, rng);
        if (same.size() > static_cast<std::size_t>(samples))
            same.resize(static_cast<std::size_t>(samples));

        std::vector<int> other;
        other.reserve(static_cast<std::size_t>(n) - by_class[static_cast<std::size_t>(k)].size());
        for (int i = 0; i < n; ++i)
            if (dataset.labels[static_cast<std::size_t>(i)] != k) other.push_back(i);
        fisher_yates(other, rng);
        if (other.size() > static_cast<std::size_t>(samples))
            other.resize(static_cast<std::size_t>(samples));

        ClassDistanceRow row;
        row.class_id = k;
        row.class_name = dataset.class_names[static_cast<std::size_t>(k)];
        row.mean_same_class_distance = mean_to(same, c);
        row.mean_other_class_distance = mean_to(other, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace emlouv
