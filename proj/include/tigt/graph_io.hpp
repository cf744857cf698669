#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tigt/graph.hpp"

namespace tigt {

// Edge-list text format:
//
//   n m
//   u v        (m lines, 0-based endpoints)
//
// Blank lines are not allowed; trailing whitespace is. Parse failures throw
// ParseError carrying the 1-based line number.
Graph parse_graph(std::istream& in);
void format_graph(const Graph& g, std::ostream& out);

Graph read_graph(const std::filesystem::path& path);
void write_graph(const Graph& g, const std::filesystem::path& path);

// One row of a dataset manifest (JSON array of these objects).
struct ManifestEntry {
    std::string graph_path;  // relative to the manifest's directory
    int label = 0;
    std::size_t class_skip = 0;
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace tigt
