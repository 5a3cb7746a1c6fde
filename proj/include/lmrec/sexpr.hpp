#pragma once

#include <string>
#include <vector>

namespace lmrec {

// S-expression node for PDDL input. Symbols are lowercased on read (PDDL is
// case-insensitive); source positions are kept for error reporting.
struct Sexpr {
    enum class Kind { Symbol, List };
    Kind kind = Kind::List;
    std::string symbol;          // when Kind::Symbol
    std::vector<Sexpr> items;    // when Kind::List
    int line = 0;
    int column = 0;

    bool is_symbol() const { return kind == Kind::Symbol; }
    bool is_list() const { return kind == Kind::List; }
    bool is_symbol(const std::string &s) const {
        return is_symbol() && symbol == s;
    }
};

// Parses one s-expression, requiring only trailing whitespace/comments after
// it. Comments run from ';' to end of line.
Sexpr read_sexpr(const std::string &text);

// Parses a whole file of s-expressions (used for multi-form inputs).
std::vector<Sexpr> read_sexprs(const std::string &text);

} // namespace lmrec
