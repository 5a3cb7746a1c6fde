#pragma once

#include "lmrec/rpg.hpp"
#include "lmrec/task.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace lmrec {

enum class LandmarkKind { Conjunctive, Disjunctive };

// A fact-formula landmark. Conjunctive: all facts hold simultaneously at some
// point in every valid plan. Disjunctive: at least one fact holds at some
// point. `supports` records which sub-goals' back-chains reach this landmark
// (bit i = goal fact at index i of LandmarkGraph::goal).
struct Landmark {
    LandmarkKind kind = LandmarkKind::Conjunctive;
    std::vector<FactId> facts; // sorted, nonempty
    std::uint64_t supports = 0;

    bool supports_subgoal(int i) const { return (supports >> i) & 1; }
    friend bool operator==(const Landmark &a, const Landmark &b) {
        return a.kind == b.kind && a.facts == b.facts;
    }
};

// Per-goal DAG of landmarks. Edge (u, v) records that u was extracted as a
// necessary prerequisite of v during back-chaining (greedy-necessary style).
struct LandmarkGraph {
    std::vector<FactId> goal; // sorted; sub-goal index = position
    bool solvable = true;     // false: empty-graph marker for unsolvable goals
    std::vector<Landmark> landmarks;
    std::vector<std::pair<int, int>> edges;

    int find(LandmarkKind kind, const std::vector<FactId> &facts) const;
    std::vector<std::vector<int>> predecessors() const;

    // Counting rule: every node is one unit (conjunctions count once;
    // sub-goal facts are their own singleton nodes).
    std::size_t num_units() const { return landmarks.size(); }
};

struct ExtractOptions {
    bool disjunctive = true;
    std::size_t max_disjunction_size = 4;
};

// RPG back-chaining with removal-based verification. Requires the goal to be
// relaxed-solvable from `initial` (throws UnsolvableGoalError otherwise).
// Deterministic: identical inputs yield identical graphs.
LandmarkGraph extract_landmarks(const GroundTask &task, const State &initial,
                                const std::vector<FactId> &goal,
                                const ExtractOptions &options = {});

// Removal test: excluding every action whose add list intersects the
// candidate's facts must make the goal relaxed-unsolvable. Goal facts are
// accepted directly (goals are trivially landmarks).
bool verify_candidate(const GroundTask &task, const Landmark &candidate,
                      const State &initial, const std::vector<FactId> &goal);

// One graph per distinct goal (set semantics); unsolvable goals map to an
// empty-graph marker with solvable = false.
std::map<std::vector<FactId>, LandmarkGraph>
extract_for_goals(const GroundTask &task, const State &initial,
                  const std::vector<std::vector<FactId>> &goals,
                  const ExtractOptions &options = {});

// Text listing: "Fact Landmarks:" header then one "(and ...)" or "(or ...)"
// line per landmark.
std::string to_listing(const LandmarkGraph &graph, const GroundTask &task);

nlohmann::json graph_to_json(const LandmarkGraph &graph, const GroundTask &task);

// Inverse of graph_to_json; fact strings are resolved against the task (new
// goal-only facts are interned). If a landmark object carries an explicit
// "supports" array it is used verbatim, otherwise supports are recomputed
// from the edges by backward reachability.
LandmarkGraph graph_from_json(const nlohmann::json &j, GroundTask &task);

} // namespace lmrec
