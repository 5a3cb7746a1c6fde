#pragma once

#include "lmrec/task.hpp"

namespace lmrec {

// The three mutually exclusive fact classes used to prune impossible goals:
//  - strictly activating: in some precondition, in no add or delete list
//  - unstable activating: in some precondition and some delete list, never added
//  - strictly terminal:   in some add list, in no precondition or delete list
// With require_in_initial (the definitions' reading) the two activating
// classes are additionally restricted to facts of the initial state.
struct FactPartitions {
    Bitset strictly_activating;
    Bitset unstable_activating;
    Bitset strictly_terminal;

    bool disjoint() const {
        return !strictly_activating.intersects(unstable_activating) &&
               !strictly_activating.intersects(strictly_terminal) &&
               !unstable_activating.intersects(strictly_terminal);
    }
};

// Single pass over the grounded actions. Deterministic and idempotent.
FactPartitions partition_facts(const GroundTask &task, const State &initial,
                               bool require_in_initial = true);

} // namespace lmrec
