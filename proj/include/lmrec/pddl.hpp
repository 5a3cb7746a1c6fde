#pragma once

#include <string>
#include <vector>

namespace lmrec::pddl {

// Parsed STRIPS fragment of PDDL. Symbols are lowercase; variables keep the
// leading '?'. Untyped entries get type "object".

struct TypedName {
    std::string name;
    std::string type = "object";
    friend bool operator==(const TypedName &, const TypedName &) = default;
};

struct Atom {
    std::string predicate;
    std::vector<std::string> args;
    friend bool operator==(const Atom &, const Atom &) = default;
};

struct PredicateDef {
    std::string name;
    std::vector<TypedName> params;
    friend bool operator==(const PredicateDef &, const PredicateDef &) = default;
};

struct OperatorDef {
    std::string name;
    std::vector<TypedName> params;
    std::vector<Atom> pre;
    std::vector<Atom> add;
    std::vector<Atom> del;
    friend bool operator==(const OperatorDef &, const OperatorDef &) = default;
};

struct Domain {
    std::string name;
    std::vector<std::string> requirements;
    bool typing = false;
    std::vector<TypedName> types;     // name + parent type
    std::vector<TypedName> constants;
    std::vector<PredicateDef> predicates;
    std::vector<OperatorDef> operators;

    const PredicateDef *find_predicate(const std::string &name) const;
    const OperatorDef *find_operator(const std::string &name) const;
    // True if `type` equals `ancestor` or derives from it via the type tree.
    bool type_matches(const std::string &type, const std::string &ancestor) const;

    friend bool operator==(const Domain &, const Domain &) = default;
};

struct Problem {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;   // problem objects only, not domain constants
    std::vector<Atom> init;
    std::vector<Atom> goal;

    friend bool operator==(const Problem &, const Problem &) = default;
};

// Accepted requirements: :strips, :typing. Anything else raises
// UnsupportedFeatureError; negative preconditions, equality, conditional
// effects and numeric effects are rejected where they appear.
Domain parse_domain(const std::string &text);

// Grounds nothing; validates that every atom uses declared predicates with
// matching arity over declared objects/constants.
Problem parse_problem(const std::string &text, const Domain &domain);

std::string to_string(const Atom &atom);
std::string pretty_print(const Domain &domain);
std::string pretty_print(const Problem &problem);

} // namespace lmrec::pddl
