#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tigt/graph.hpp"

namespace tigt {

// Named graphs the built-in theorem checks run on:
//   csl_41_2, csl_41_3, c6, two_c3      (theorem 1)
//   rook, shrikhande                    (theorem 2)
//   bowtie, c5_chord                    (theorem 3)
//   c3, csl_markov                      (theorem 4)
struct TheoremFixtures {
    std::map<std::string, Graph> graphs;

    static TheoremFixtures builtin();
    const Graph& at(const std::string& name) const;
};

struct TheoremRecord {
    int theorem = 0;
    std::string pair;
    nlohmann::json expected;
    nlohmann::json observed;
    bool pass = false;

    nlohmann::json to_json() const;
};

inline constexpr std::size_t kMarkovSteps = 51;  // slices l = 0..50

TheoremRecord verify_theorem(int theorem, const TheoremFixtures& fixtures);
// All four, or only `only`. Throws ParameterError for a theorem outside 1..4.
std::vector<TheoremRecord> verify_theorems(const TheoremFixtures& fixtures, std::optional<int> only = std::nullopt);

}  // namespace tigt
