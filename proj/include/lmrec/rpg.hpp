#pragma once

#include "lmrec/task.hpp"

#include <limits>
#include <vector>

namespace lmrec {

// Delete-relaxation reachability levels. Facts keep the first level at which
// they appear (levels are monotone: no deletion); unreachable entries hold
// the kUnreachable sentinel. Only first levels are stored, not layered sets.
struct RelaxedPlanningGraph {
    static constexpr int kUnreachable = std::numeric_limits<int>::max();

    std::vector<int> fact_level;   // indexed by FactId
    std::vector<int> action_level; // max over pre fact levels; kUnreachable if any pre is
    int num_levels = 0;            // levels until fixpoint

    bool reachable(FactId f) const {
        return static_cast<std::size_t>(f) < fact_level.size() &&
               fact_level[f] != kUnreachable;
    }
    bool reachable_all(const std::vector<FactId> &facts) const {
        for (FactId f : facts)
            if (!reachable(f)) return false;
        return true;
    }
};

// Counter-based fixpoint over the task's actions, never applying actions in
// `excluded` (bitset over action ids; pass an empty bitset for none).
RelaxedPlanningGraph build_rpg(const GroundTask &task, const State &initial,
                               const Bitset &excluded);

// True iff every goal fact has a finite level with `excluded` removed.
bool relaxed_solvable(const GroundTask &task, const State &initial,
                      const std::vector<FactId> &goal, const Bitset &excluded);

} // namespace lmrec
