#include "emlouv/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace emlouv {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

// Splits on any run of spaces/tabs/CR. Returns tokens as views into `line`.
void split_ws(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        while (i < n && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < n && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
}

double parse_feature(std::string_view tok, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad feature value '" +
                                 std::string(tok) + "'");
    if (!std::isfinite(v))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-finite feature value");
    return v;
}

} // namespace

LabeledDataset load_citation_dataset(const std::string& content_path, const std::string& cites_path) {
    LabeledDataset ds;
    std::unordered_map<std::string, int> node_ids;
    std::unordered_map<std::string, int> class_ids;

    const std::string content = slurp(content_path);
    std::vector<std::string_view> toks;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        split_ws(line, toks);
        if (toks.empty()) continue;
        if (toks.size() < 3)
            throw std::runtime_error(content_path + ":" + std::to_string(line_no) +
                                     ": expected node id, features, class name");

        if (ds.feature_dim == 0) ds.feature_dim = toks.size() - 2;
        if (toks.size() - 2 != ds.feature_dim)
            throw std::runtime_error(content_path + ":" + std::to_string(line_no) +
                                     ": feature dimension mismatch (" +
                                     std::to_string(toks.size() - 2) + " vs " +
                                     std::to_string(ds.feature_dim) + ")");

        std::string name(toks.front());
        auto [it, inserted] = node_ids.emplace(name, static_cast<int>(ds.node_names.size()));
        if (!inserted)
            throw std::runtime_error(content_path + ":" + std::to_string(line_no) +
                                     ": duplicate node id '" + name + "'");
        ds.node_names.push_back(std::move(name));

        for (std::size_t i = 1; i + 1 < toks.size(); ++i)
            ds.features.push_back(parse_feature(toks[i], content_path, line_no));

        std::string cls(toks.back());
        auto [cit, cinserted] = class_ids.emplace(cls, static_cast<int>(ds.class_names.size()));
        if (cinserted) ds.class_names.push_back(std::move(cls));
        ds.labels.push_back(cit->second);
    }
    if (ds.node_names.empty()) throw std::runtime_error(content_path + ": empty content file");
    ds.class_count = static_cast<int>(ds.class_names.size());

    const std::string cites = slurp(cites_path);
    std::vector<WeightedEdge> edges;
    pos = 0;
    line_no = 0;
    while (pos < cites.size()) {
        std::size_t eol = cites.find('\n', pos);
        if (eol == std::string::npos) eol = cites.size();
        std::string_view line(cites.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        split_ws(line, toks);
        if (toks.empty()) continue;
        if (toks.size() != 2)
            throw std::runtime_error(cites_path + ":" + std::to_string(line_no) +
                                     ": expected 'cited_id citing_id'");
        ++ds.stats.cites_lines;
        auto a = node_ids.find(std::string(toks[0]));
        auto b = node_ids.find(std::string(toks[1]));
        if (a == node_ids.end() || b == node_ids.end()) {
            ++ds.stats.dropped_unknown;
            continue;
        }
        if (a->second == b->second) ++ds.stats.self_citations;
        edges.push_back({a->second, b->second, 1.0});
    }

    ds.graph = Graph::from_edges(static_cast<int>(ds.node_names.size()), edges);
    ds.stats.unique_undirected_edges = ds.graph.undirected_edge_count() + ds.graph.self_loop_count();
    const std::size_t kept = ds.stats.cites_lines - ds.stats.dropped_unknown;
    ds.stats.duplicate_pairs = kept - ds.stats.unique_undirected_edges;
    return ds;
}

} // namespace emlouv
