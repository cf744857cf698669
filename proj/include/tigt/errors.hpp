#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tigt {

// Root of every error thrown by the library. `kind()` is a short stable tag
// used by the command-line front end for its machine-parsable error prefix.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

// Invalid argument to a constructor, generator or graph edit.
class ParameterError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "parameter"; }
};

// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

// Tensor shapes that do not fit the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "shape"; }
};

// Misuse of the gradient tape (non-scalar loss, backward twice, ...).
class AutodiffError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "autodiff"; }
};

// Input outside the range an algorithm is prepared to handle (size guards).
class CapabilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "capability"; }
};

// Pair of graphs that does not satisfy the hypothesis of a verdict procedure.
class HypothesisError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "hypothesis"; }
};

// Graph property required by an operation does not hold (isolated node,
// bipartite chain, disconnected input, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "precondition"; }
};

class SplitError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "split"; }
};

// Non-finite loss or other numerical breakdown during training.
class TrainingError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "training"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

}  // namespace tigt
