#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tigt/tensor.hpp"

namespace gradcheck {

struct Instance {
    std::vector<tigt::Tensor> inputs;  // leaves that require grad
    std::function<tigt::Tensor()> loss;
};

struct OpCase {
    std::string name;
    std::function<Instance(std::mt19937_64&)> make;
};

// One entry per differentiable operation, each drawing random shapes and
// values. Every loss contracts the op output with fixed random weights.
std::vector<OpCase> op_cases();

struct Result {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

// Backward once on a fresh tape, then compare every input element (at most
// `max_elements` per input, chosen at random) against central differences.
Result check(const Instance& inst, std::mt19937_64& rng, double eps = 1e-4, std::size_t max_elements = 64);

}  // namespace gradcheck
