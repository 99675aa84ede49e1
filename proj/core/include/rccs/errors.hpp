#ifndef RCCS_ERRORS_HPP
#define RCCS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rccs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error with source position (1-based line/column).
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line), column(column) {}
    std::size_t line;
    std::size_t column;
};

class FreeVariableError : public Error {
public:
    explicit FreeVariableError(const std::string& name)
        : Error("free variable: " + name), name(name) {}
    std::string name;
};

class UnguardedVariableError : public Error {
public:
    explicit UnguardedVariableError(const std::string& name)
        : Error("unguarded fixpoint variable: " + name), name(name) {}
    std::string name;
};

class ProbabilitySumNotOneError : public Error {
public:
    explicit ProbabilitySumNotOneError(const std::string& sum)
        : Error("probabilistic choice does not sum to 1 (sum = " + sum + ")"), sum(sum) {}
    std::string sum;
};

class ProbabilityOutOfRangeError : public Error {
public:
    explicit ProbabilityOutOfRangeError(const std::string& value)
        : Error("branch probability outside (0,1): " + value), value(value) {}
    std::string value;
};

class StateExplosionError : public Error {
public:
    explicit StateExplosionError(std::size_t limit)
        : Error("state space exceeds the configured cap of " + std::to_string(limit) + " states"),
          limit(limit) {}
    std::size_t limit;
};

class PartNotSubsetError : public Error {
public:
    PartNotSubsetError() : Error("split part is empty or not a subset of the block") {}
};

class GoalOutsideGraphError : public Error {
public:
    GoalOutsideGraphError() : Error("goal set contains a node outside the graph") {}
};

class IllFormedQueryError : public Error {
public:
    explicit IllFormedQueryError(const std::string& what) : Error("ill-formed query: " + what) {}
};

class NotASplitterError : public Error {
public:
    NotASplitterError() : Error("splitter does not separate its block") {}
};

class MassNotNormalizedError : public Error {
public:
    MassNotNormalizedError() : Error("class mass vector does not sum to 1") {}
};

} // namespace rccs

#endif
