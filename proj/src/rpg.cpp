#include "lmrec/rpg.hpp"

namespace lmrec {

RelaxedPlanningGraph build_rpg(const GroundTask &task, const State &initial,
                               const Bitset &excluded) {
    const int kInf = RelaxedPlanningGraph::kUnreachable;
    RelaxedPlanningGraph rpg;
    rpg.fact_level.assign(task.num_facts(), kInf);
    rpg.action_level.assign(task.num_actions(), kInf);

    // Per-fact consumer lists so each action's counter is decremented once
    // per satisfied precondition.
    std::vector<std::vector<ActionId>> consumers(task.num_facts());
    std::vector<int> missing(task.num_actions(), 0);
    for (auto &a : task.actions) {
        missing[a.id] = static_cast<int>(a.pre.size());
        for (FactId f : a.pre) consumers[f].push_back(a.id);
    }

    std::vector<FactId> frontier;
    for (std::size_t f = 0; f < initial.size(); ++f)
        if (initial.test(f)) {
            rpg.fact_level[f] = 0;
            frontier.push_back(static_cast<FactId>(f));
        }

    auto excluded_action = [&](ActionId a) {
        return excluded.size() > 0 && excluded.test(static_cast<std::size_t>(a));
    };

    int level = 0;
    // Zero-precondition actions fire at level 0.
    std::vector<ActionId> triggered;
    for (auto &a : task.actions)
        if (missing[a.id] == 0 && !excluded_action(a.id)) triggered.push_back(a.id);

    while (true) {
        for (FactId f : frontier)
            for (ActionId aid : consumers[f])
                if (--missing[aid] == 0 && !excluded_action(aid))
                    triggered.push_back(aid);

        std::vector<FactId> next;
        for (ActionId aid : triggered) {
            rpg.action_level[aid] = level;
            for (FactId f : task.actions[aid].add)
                if (rpg.fact_level[f] == kInf) {
                    rpg.fact_level[f] = level + 1;
                    next.push_back(f);
                }
        }
        triggered.clear();
        if (next.empty()) break;
        frontier = std::move(next);
        ++level;
    }
    rpg.num_levels = level + 1;
    return rpg;
}

bool relaxed_solvable(const GroundTask &task, const State &initial,
                      const std::vector<FactId> &goal, const Bitset &excluded) {
    RelaxedPlanningGraph rpg = build_rpg(task, initial, excluded);
    return rpg.reachable_all(goal);
}

} // namespace lmrec
