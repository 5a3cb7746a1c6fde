#include "lmrec/obsgen.hpp"

#include "lmrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <unordered_map>

namespace lmrec {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// Additive relaxed cost of the goal from `state`; Dijkstra-style over facts
// with unit action costs.
int h_add(const GroundTask &task, const State &state,
          const std::vector<FactId> &goal) {
    std::vector<int> cost(task.num_facts(), kInf);
    std::vector<int> missing(task.num_actions());
    std::vector<std::vector<ActionId>> consumers(task.num_facts());
    for (auto &a : task.actions) {
        missing[a.id] = static_cast<int>(a.pre.size());
        for (FactId f : a.pre) consumers[f].push_back(a.id);
    }
    using Entry = std::pair<int, FactId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::vector<int> action_cost(task.num_actions(), 0);

    auto trigger = [&](ActionId aid) {
        int c = action_cost[aid] + 1;
        for (FactId f : task.actions[aid].add)
            if (c < cost[f]) {
                cost[f] = c;
                open.emplace(c, f);
            }
    };

    for (std::size_t f = 0; f < state.size(); ++f)
        if (state.test(f)) {
            cost[f] = 0;
            open.emplace(0, static_cast<FactId>(f));
        }
    for (auto &a : task.actions)
        if (missing[a.id] == 0) trigger(a.id);

    while (!open.empty()) {
        auto [c, f] = open.top();
        open.pop();
        if (c > cost[f]) continue;
        for (ActionId aid : consumers[f]) {
            action_cost[aid] += c;
            if (--missing[aid] == 0) trigger(aid);
        }
    }

    long long total = 0;
    for (FactId g : goal) {
        if (cost[g] == kInf) return kInf;
        total += cost[g];
    }
    return total > kInf ? kInf : static_cast<int>(total);
}

// Drops actions whose removal keeps the plan valid, until a fixpoint.
// Greedy search plans can contain plateau detours; recognition datasets
// expect lean plans.
std::vector<ActionId> reduce_plan(const GroundTask &task, const State &initial,
                                  const std::vector<FactId> &goal,
                                  std::vector<ActionId> plan) {
    auto valid = [&](const std::vector<ActionId> &candidate) {
        State s = initial;
        for (ActionId id : candidate) {
            if (!applicable(task, s, task.actions[id])) return false;
            s = apply(task, s, task.actions[id]);
        }
        return satisfies(s, goal);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            std::vector<ActionId> shorter = plan;
            shorter.erase(shorter.begin() + static_cast<long>(i));
            if (valid(shorter)) {
                plan = std::move(shorter);
                changed = true;
                break;
            }
        }
    }
    return plan;
}

} // namespace

std::vector<ActionId> find_plan(const GroundTask &task, const State &initial,
                                const std::vector<FactId> &goal,
                                const PlannerLimits &limits) {
    if (satisfies(initial, goal)) return {};

    struct Node {
        State state;
        int parent = -1;
        ActionId via = -1;
    };
    std::vector<Node> nodes;
    std::unordered_map<Bitset, int, BitsetHash> seen;

    using Entry = std::pair<int, int>; // (h, node index); index breaks ties FIFO
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    int h0 = h_add(task, initial, goal);
    if (h0 == kInf) throw UnsolvableGoalError("goal unreachable from state");
    nodes.push_back({initial, -1, -1});
    seen.emplace(initial, 0);
    open.emplace(h0, 0);

    std::size_t expansions = 0;
    while (!open.empty()) {
        auto [h, idx] = open.top();
        open.pop();
        if (++expansions > limits.max_expansions)
            throw SearchLimitError("node budget exceeded");
        State current = nodes[idx].state;
        for (const GroundAction &a : task.actions) {
            if (!applicable(task, current, a)) continue;
            State next = apply(task, current, a);
            if (seen.count(next)) continue;
            int node_index = static_cast<int>(nodes.size());
            nodes.push_back({next, idx, a.id});
            seen.emplace(std::move(next), node_index);
            if (satisfies(nodes[node_index].state, goal)) {
                std::vector<ActionId> plan;
                for (int n = node_index; nodes[n].parent >= 0; n = nodes[n].parent)
                    plan.push_back(nodes[n].via);
                std::reverse(plan.begin(), plan.end());
                return reduce_plan(task, initial, goal, std::move(plan));
            }
            int hn = h_add(task, nodes[node_index].state, goal);
            if (hn == kInf) continue;
            open.emplace(hn, node_index);
        }
    }
    throw SearchLimitError("search space exhausted without reaching the goal");
}

std::vector<ActionId> project_missing(const std::vector<ActionId> &plan,
                                      const ObservationSpec &spec) {
    if (plan.empty()) throw ValidationError("cannot project an empty plan");
    if (!(spec.observability > 0.0) || spec.observability > 1.0)
        throw ValidationError("observability must be in (0, 1]");
    std::size_t keep = static_cast<std::size_t>(
        std::ceil(spec.observability * static_cast<double>(plan.size())));
    keep = std::min(keep, plan.size());

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> indices(plan.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
        std::swap(indices[i], indices[pick(rng)]);
    }
    indices.resize(keep);
    std::sort(indices.begin(), indices.end()); // order preservation
    std::vector<ActionId> out;
    out.reserve(keep);
    for (std::size_t i : indices) out.push_back(plan[i]);
    return out;
}

std::vector<ActionId> inject_noise(const std::vector<ActionId> &observations,
                                   const ObservationSpec &spec,
                                   const GroundTask &task,
                                   const std::vector<ActionId> &plan) {
    if (spec.noise_count < 0) throw ValidationError("negative noise count");
    std::vector<bool> in_plan(task.num_actions(), false);
    for (ActionId a : plan) in_plan[a] = true;
    std::vector<ActionId> pool;
    for (auto &a : task.actions)
        if (!in_plan[a.id]) pool.push_back(a.id);
    if (pool.size() < static_cast<std::size_t>(spec.noise_count))
        throw ValidationError("not enough non-plan actions for noise");

    std::mt19937_64 rng(spec.seed ^ 0x6e6f697365ULL); // decouple from sampling
    std::vector<ActionId> out = observations;
    for (int k = 0; k < spec.noise_count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        ActionId noise = pool[pick(rng)];
        std::uniform_int_distribution<std::size_t> pos(0, out.size());
        out.insert(out.begin() + static_cast<long>(pos(rng)), noise);
    }
    return out;
}

} // namespace lmrec
