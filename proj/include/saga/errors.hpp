#ifndef SAGA_ERRORS_HPP
#define SAGA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace saga {

// Base class for everything thrown by the analyzer.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed source text (Python or aspect definitions). Carries a position.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, int line, int col)
        : Error(msg + " at line " + std::to_string(line) + ", column " +
                std::to_string(col)),
          line(line), col(col) {}
    int line;
    int col;
};

// A parsed construct the analyzer does not model.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Qualifier does not resolve to a procedure or class.
class LookupError : public Error {
public:
    using Error::Error;
};

// Structurally invalid input files (annotations, fixture manifests).
class FormatError : public Error {
public:
    using Error::Error;
};

// Semantic checks on aspect definitions (duplicate names, unresolved
// references, bad pointcut labels).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Violated construction invariants while building a graph.
class ConstructionError : public Error {
public:
    using Error::Error;
};

// Failures while executing advice or traversing (type mismatches, missing
// aspects, merge conflicts, divergence).
class EvalError : public Error {
public:
    using Error::Error;
};

// API misuse: a caller broke an operation precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace saga

#endif
