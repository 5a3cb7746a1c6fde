#pragma once

#include <stdexcept>
#include <string>

namespace lmrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lexical or syntactic PDDL error, with 1-based source position.
struct ParseError : Error {
    ParseError(const std::string &what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line), column(column) {}
    int line = 0;
    int column = 0;
};

// Syntactically valid PDDL outside the supported STRIPS fragment.
struct UnsupportedFeatureError : ParseError {
    UnsupportedFeatureError(const std::string &feature, int line, int column)
        : ParseError("unsupported feature: " + feature, line, column),
          feature(feature) {}
    std::string feature;
};

// Semantic errors: undeclared symbols, arity mismatches, bad references.
struct ValidationError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct UnsolvableGoalError : Error {
    using Error::Error;
};

struct SearchLimitError : Error {
    using Error::Error;
};

struct TimeoutError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace lmrec
