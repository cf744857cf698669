#include "tigt/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tigt/errors.hpp"

namespace tigt {
namespace {

// Splits a line into exactly two non-negative integers.
bool parse_pair(const std::string& line, std::uint64_t& a, std::uint64_t& b) {
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip_ws = [&] {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    };
    skip_ws();
    auto r1 = std::from_chars(p, end, a);
    if (r1.ec != std::errc{} || r1.ptr == p) return false;
    p = r1.ptr;
    if (p == end || (*p != ' ' && *p != '\t')) return false;
    skip_ws();
    auto r2 = std::from_chars(p, end, b);
    if (r2.ec != std::errc{} || r2.ptr == p) return false;
    p = r2.ptr;
    skip_ws();
    return p == end;
}

}  // namespace

Graph parse_graph(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(line_no, "missing header \"n m\"");
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    if (!parse_pair(line, n, m)) throw ParseError(line_no, "expected header \"n m\", got \"" + line + "\"");

    std::vector<Edge> edges;
    edges.reserve(m);
    std::set<Edge> seen;
    for (std::uint64_t i = 0; i < m; ++i) {
        ++line_no;
        if (!std::getline(in, line)) {
            throw ParseError(line_no, "expected " + std::to_string(m) + " edges, found " + std::to_string(i));
        }
        std::uint64_t u = 0;
        std::uint64_t v = 0;
        if (!parse_pair(line, u, v)) throw ParseError(line_no, "expected \"u v\", got \"" + line + "\"");
        if (u >= n || v >= n) {
            throw ParseError(line_no, "endpoint " + std::to_string(u >= n ? u : v) + " >= n = " + std::to_string(n));
        }
        if (u == v) throw ParseError(line_no, "self-loop at node " + std::to_string(u));
        const Edge e = make_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
        if (!seen.insert(e).second) {
            throw ParseError(line_no, "duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
        }
        edges.push_back(e);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw ParseError(line_no, "unexpected content after " + std::to_string(m) + " edges");
        }
    }
    return Graph(n, std::move(edges));
}

void format_graph(const Graph& g, std::ostream& out) {
    out << g.num_nodes() << ' ' << g.num_edges() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_graph(in);
}

void write_graph(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    format_graph(g, out);
    if (!out) throw IoError("write failed for " + path.string());
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& e : entries) {
        doc.push_back({{"graph_path", e.graph_path}, {"label", e.label}, {"class_skip", e.class_skip}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(1, std::string("manifest is not valid JSON: ") + ex.what());
    }
    if (!doc.is_array()) throw ParseError(1, "manifest must be a JSON array");
    std::vector<ManifestEntry> entries;
    for (const auto& item : doc) {
        try {
            entries.push_back({item.at("graph_path").get<std::string>(), item.at("label").get<int>(),
                               item.at("class_skip").get<std::size_t>()});
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(1, std::string("bad manifest entry: ") + ex.what());
        }
    }
    return entries;
}

}  // namespace tigt
