#include "emlouv/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>

namespace emlouv {

namespace {
constexpr double kNormFloor = 1e-12;
}

EmbeddingMatrix propagate_features(const LabeledDataset& dataset, int hops) {
    if (hops < 1) throw std::invalid_argument("hops must be >= 1");
    if (dataset.feature_dim == 0) throw std::invalid_argument("dataset has no features");
    for (double v : dataset.features)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");

    const Graph& g = dataset.graph;
    const int n = g.node_count();
    const std::size_t d = dataset.feature_dim;

    // Row sums of A + I; adjacency weights plus the unit self-loop plus any
    // existing self-loop weight (single-count here, unlike the modularity
    // degree convention).
    std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        double deg = 1.0 + g.self_loop(u);
        for (const auto& e : g.neighbors(u)) deg += e.weight;
        inv_sqrt_deg[static_cast<std::size_t>(u)] = 1.0 / std::sqrt(deg);
    }

    EmbeddingMatrix cur(static_cast<std::size_t>(n), d);
    cur.data = dataset.features;
    EmbeddingMatrix next(static_cast<std::size_t>(n), d);

    for (int hop = 0; hop < hops; ++hop) {
        std::fill(next.data.begin(), next.data.end(), 0.0);
        for (int u = 0; u < n; ++u) {
            const double su = inv_sqrt_deg[static_cast<std::size_t>(u)];
            auto dst = next.row(static_cast<std::size_t>(u));
            // diagonal term: unit self-loop plus any native self-loop weight
            {
                const double a = (1.0 + g.self_loop(u)) * su * su;
                auto src = cur.row(static_cast<std::size_t>(u));
                for (std::size_t f = 0; f < d; ++f) dst[f] += a * src[f];
            }
            for (const auto& e : g.neighbors(u)) {
                const double a = e.weight * su * inv_sqrt_deg[static_cast<std::size_t>(e.neighbor)];
                auto src = cur.row(static_cast<std::size_t>(e.neighbor));
                for (std::size_t f = 0; f < d; ++f) dst[f] += a * src[f];
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

EmbeddingMatrix load_embeddings(const std::string& path, std::size_t expected_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings: " + path);

    EmbeddingMatrix m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ')) sv.remove_suffix(1);
        if (sv.empty()) continue;

        std::size_t cols = 0;
        std::size_t start = 0;
        while (start <= sv.size()) {
            std::size_t comma = sv.find(',', start);
            std::string_view tok = sv.substr(start, comma == std::string_view::npos ? sv.size() - start
                                                                                    : comma - start);
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad value '" +
                                         std::string(tok) + "' in column " + std::to_string(cols + 1));
            m.data.push_back(v);
            ++cols;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (m.dim == 0) m.dim = cols;
        if (cols != m.dim)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(m.dim) + " columns, found " + std::to_string(cols));
        ++m.rows;
    }
    if (m.rows == 0) throw std::runtime_error(path + ": empty embeddings file");
    if (m.rows != expected_rows)
        throw std::runtime_error(path + ": row count " + std::to_string(m.rows) +
                                 " does not match expected " + std::to_string(expected_rows));
    return m;
}

void save_embeddings(const EmbeddingMatrix& embeddings, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embeddings: " + path);
    out.precision(17);
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
        auto r = embeddings.row(i);
        for (std::size_t f = 0; f < embeddings.dim; ++f) {
            if (f) out << ',';
            out << r[f];
        }
        out << '\n';
    }
}

void l2_normalize_rows(EmbeddingMatrix& embeddings) {
    for (std::size_t i = 0; i < embeddings.rows; ++i) {
        auto r = embeddings.row(i);
        double sq = 0.0;
        for (double v : r) sq += v * v;
        const double norm = std::sqrt(sq);
        if (norm < kNormFloor) continue;
        for (double& v : r) v /= norm;
    }
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_distance: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < kNormFloor || nb < kNormFloor) return 1.0;
    double c = dot / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return 1.0 - c;
}

Centroid centroid(const EmbeddingMatrix& embeddings, std::span<const int> members) {
    if (members.empty()) throw std::invalid_argument("centroid of empty member list");
    Centroid c;
    c.vector.assign(embeddings.dim, 0.0);
    for (int m : members) {
        auto r = embeddings.row(static_cast<std::size_t>(m));
        for (std::size_t f = 0; f < embeddings.dim; ++f) c.vector[f] += r[f];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (double& v : c.vector) v *= inv;
    c.member_count = static_cast<int>(members.size());
    return c;
}

} // namespace emlouv
