#pragma once

#include "lmrec/bitset.hpp"
#include "lmrec/pddl.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lmrec {

using FactId = int;
using ActionId = int;

// Closed-world state over interned facts: holds(f) iff bit f is set.
using State = Bitset;

struct SymbolTable {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;

    int intern(const std::string &s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(names.size());
        names.push_back(s);
        index.emplace(s, id);
        return id;
    }
    int find(const std::string &s) const {
        auto it = index.find(s);
        return it == index.end() ? -1 : it->second;
    }
};

struct GroundFact {
    int predicate = -1;
    std::vector<int> args;
    friend bool operator==(const GroundFact &, const GroundFact &) = default;
};

// Interns positive ground facts to dense ids. Equality of GroundFacts is
// componentwise, so interning preserves fact identity.
class FactTable {
public:
    FactId intern(const GroundFact &f);
    std::optional<FactId> find(const GroundFact &f) const;
    const GroundFact &fact(FactId id) const { return facts_[id]; }
    std::size_t size() const { return facts_.size(); }

    SymbolTable predicates;
    SymbolTable objects;

    std::string to_string(FactId id) const;

private:
    struct KeyHash {
        std::size_t operator()(const GroundFact &f) const {
            std::size_t h = std::hash<int>()(f.predicate);
            for (int a : f.args)
                h ^= std::hash<int>()(a) + 0x9e3779b9 + (h << 6) + (h >> 2);
            return h;
        }
    };
    std::vector<GroundFact> facts_;
    std::unordered_map<GroundFact, FactId, KeyHash> index_;
};

struct GroundAction {
    ActionId id = -1;
    std::string signature; // "(name arg1 arg2)", lowercase
    int operator_index = -1;
    std::vector<int> args;          // object symbol ids
    std::vector<FactId> pre;        // sorted, unique
    std::vector<FactId> add;        // sorted, unique
    std::vector<FactId> del;        // sorted, unique; disjoint from add
    int cost = 1;                   // uniform cost
};

// Grounded planning instance. Immutable after construction except for
// intern_goal_facts, which may extend the fact universe with goal-only facts;
// states and reachability sets are sized against num_facts() at use time.
struct GroundTask {
    pddl::Domain domain;
    FactTable facts;
    std::vector<GroundAction> actions;
    std::vector<FactId> initial_facts; // sorted
    std::vector<FactId> goal;          // sorted
    std::vector<std::string> warnings;

    std::size_t num_facts() const { return facts.size(); }
    std::size_t num_actions() const { return actions.size(); }

    State initial_state() const;
    std::string fact_name(FactId f) const { return facts.to_string(f); }

    // Case-insensitive lookup of "(name a b)" against grounded signatures.
    std::optional<ActionId> find_action(const std::string &signature) const;

    // Actions whose add list contains f; built by ground(), extended lazily
    // for goal-only facts (which have no achievers).
    const std::vector<ActionId> &achievers(FactId f) const;

    // Interns ground atoms (validated against the domain) as goal facts,
    // e.g. one recognition hypothesis. Returns sorted fact ids.
    std::vector<FactId> intern_goal_facts(const std::vector<pddl::Atom> &atoms);

private:
    mutable std::vector<std::vector<ActionId>> achievers_;
    std::unordered_map<std::string, ActionId> signature_index_;
    friend GroundTask ground(const pddl::Domain &, const pddl::Problem &);
};

// Instantiates every operator over all-different object bindings
// (type-consistent when :typing is declared), in deterministic lexicographic
// signature order. Initial state and goal are grounded against the domain.
GroundTask ground(const pddl::Domain &domain, const pddl::Problem &problem);

bool applicable(const GroundTask &task, const State &state,
                const GroundAction &action);

// (state \ del) ∪ add. Throws PreconditionError when not applicable.
State apply(const GroundTask &task, const State &state,
            const GroundAction &action);

bool satisfies(const State &state, const std::vector<FactId> &goal);

// Applies a plan from `state`, validating every step. Returns the final state.
State replay(const GroundTask &task, const State &state,
             const std::vector<ActionId> &plan);

} // namespace lmrec
