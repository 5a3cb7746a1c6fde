#pragma once

#include "lmrec/task.hpp"

#include <cstdint>
#include <vector>

namespace lmrec {

struct ObservationSpec {
    double observability = 1.0; // fraction of plan actions kept, in (0, 1]
    int noise_count = 0;        // spurious actions inserted
    std::uint64_t seed = 0;
};

struct PlannerLimits {
    std::size_t max_expansions = 200000;
};

// Greedy best-first search with the additive relaxed heuristic. Deterministic
// under fixed tie-breaking (heuristic value, then insertion order; successors
// generated in ascending action id). The plan is valid but not necessarily
// optimal. Throws UnsolvableGoalError / SearchLimitError.
std::vector<ActionId> find_plan(const GroundTask &task, const State &initial,
                                const std::vector<FactId> &goal,
                                const PlannerLimits &limits = {});

// Keeps ceil(observability * |plan|) actions, sampled uniformly without
// replacement, original order preserved.
std::vector<ActionId> project_missing(const std::vector<ActionId> &plan,
                                      const ObservationSpec &spec);

// Inserts spec.noise_count actions drawn uniformly from the grounded actions
// not occurring in `plan`, at uniformly random positions; the relative order
// of genuine observations is preserved. Noise actions need not be applicable
// in context.
std::vector<ActionId> inject_noise(const std::vector<ActionId> &observations,
                                   const ObservationSpec &spec,
                                   const GroundTask &task,
                                   const std::vector<ActionId> &plan);

} // namespace lmrec
