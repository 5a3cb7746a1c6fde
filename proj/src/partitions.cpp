#include "lmrec/partitions.hpp"

namespace lmrec {

FactPartitions partition_facts(const GroundTask &task, const State &initial,
                               bool require_in_initial) {
    std::size_t n = task.num_facts();
    std::vector<bool> in_pre(n), in_add(n), in_del(n);
    for (auto &a : task.actions) {
        for (FactId f : a.pre) in_pre[f] = true;
        for (FactId f : a.add) in_add[f] = true;
        for (FactId f : a.del) in_del[f] = true;
    }

    FactPartitions p;
    p.strictly_activating = Bitset(n);
    p.unstable_activating = Bitset(n);
    p.strictly_terminal = Bitset(n);
    for (std::size_t f = 0; f < n; ++f) {
        bool in_initial = f < initial.size() && initial.test(f);
        if (require_in_initial && !in_initial && !in_add[f])
            continue; // activating classes need f ∈ I; terminal needs in_add
        if (in_pre[f] && !in_add[f] && !in_del[f] &&
            (!require_in_initial || in_initial))
            p.strictly_activating.set(f);
        else if (in_pre[f] && !in_add[f] && in_del[f] &&
                 (!require_in_initial || in_initial))
            p.unstable_activating.set(f);
        else if (in_add[f] && !in_pre[f] && !in_del[f])
            p.strictly_terminal.set(f);
    }
    return p;
}

} // namespace lmrec
