#include "lmrec/task.hpp"

#include "lmrec/errors.hpp"

#include <algorithm>
#include <cctype>

namespace lmrec {

FactId FactTable::intern(const GroundFact &f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    FactId id = static_cast<FactId>(facts_.size());
    facts_.push_back(f);
    index_.emplace(f, id);
    return id;
}

std::optional<FactId> FactTable::find(const GroundFact &f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string FactTable::to_string(FactId id) const {
    const GroundFact &f = facts_[id];
    std::string s = "(" + predicates.names[f.predicate];
    for (int a : f.args) s += " " + objects.names[a];
    s += ")";
    return s;
}

namespace {

std::string lowercase(std::string s) {
    for (auto &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void sort_unique(std::vector<FactId> &v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

struct Grounder {
    const pddl::Domain &domain;
    GroundTask &task;
    std::vector<pddl::TypedName> universe; // problem objects + domain constants

    FactId intern_atom(const pddl::Atom &atom,
                       const std::vector<int> *binding,
                       const pddl::OperatorDef *op) {
        GroundFact f;
        f.predicate = task.facts.predicates.intern(atom.predicate);
        for (auto &arg : atom.args) {
            if (!arg.empty() && arg[0] == '?') {
                int pi = -1;
                for (std::size_t k = 0; k < op->params.size(); ++k)
                    if (op->params[k].name == arg) pi = static_cast<int>(k);
                f.args.push_back((*binding)[pi]);
            } else {
                f.args.push_back(task.facts.objects.intern(arg));
            }
        }
        return task.facts.intern(f);
    }

    void instantiate(const pddl::OperatorDef &op, int op_index,
                     std::vector<int> &binding, std::size_t depth,
                     std::vector<GroundAction> &out) {
        if (depth == op.params.size()) {
            GroundAction a;
            a.operator_index = op_index;
            a.args = binding;
            a.signature = "(" + op.name;
            for (int obj : binding) a.signature += " " + task.facts.objects.names[obj];
            a.signature += ")";
            for (auto &atom : op.pre) a.pre.push_back(intern_atom(atom, &binding, &op));
            for (auto &atom : op.add) a.add.push_back(intern_atom(atom, &binding, &op));
            for (auto &atom : op.del) a.del.push_back(intern_atom(atom, &binding, &op));
            sort_unique(a.pre);
            sort_unique(a.add);
            sort_unique(a.del);
            // Overlapping add/del after grounding: the add wins.
            std::vector<FactId> kept;
            for (FactId f : a.del) {
                if (std::binary_search(a.add.begin(), a.add.end(), f))
                    task.warnings.push_back("action " + a.signature +
                                            ": fact " + task.facts.to_string(f) +
                                            " in both add and delete lists; keeping add");
                else
                    kept.push_back(f);
            }
            a.del = std::move(kept);
            out.push_back(std::move(a));
            return;
        }
        const std::string &ptype = op.params[depth].type;
        for (std::size_t i = 0; i < universe.size(); ++i) {
            if (domain.typing && !domain.type_matches(universe[i].type, ptype))
                continue;
            int obj = task.facts.objects.find(universe[i].name);
            bool repeated = false;
            for (std::size_t d = 0; d < depth; ++d)
                if (binding[d] == obj) repeated = true;
            if (repeated) continue;
            binding[depth] = obj;
            instantiate(op, op_index, binding, depth + 1, out);
        }
    }
};

} // namespace

GroundTask ground(const pddl::Domain &domain, const pddl::Problem &problem) {
    GroundTask task;
    task.domain = domain;

    Grounder g{domain, task, {}};
    for (auto &c : domain.constants) g.universe.push_back(c);
    for (auto &o : problem.objects) g.universe.push_back(o);
    for (auto &o : g.universe) task.facts.objects.intern(o.name);

    std::vector<GroundAction> actions;
    for (std::size_t i = 0; i < domain.operators.size(); ++i) {
        std::vector<int> binding(domain.operators[i].params.size(), -1);
        g.instantiate(domain.operators[i], static_cast<int>(i), binding, 0,
                      actions);
    }
    std::sort(actions.begin(), actions.end(),
              [](const GroundAction &a, const GroundAction &b) {
                  return a.signature < b.signature;
              });
    for (std::size_t i = 0; i < actions.size(); ++i)
        actions[i].id = static_cast<ActionId>(i);
    task.actions = std::move(actions);

    for (auto &atom : problem.init) {
        GroundFact f;
        f.predicate = task.facts.predicates.intern(atom.predicate);
        for (auto &arg : atom.args) f.args.push_back(task.facts.objects.intern(arg));
        task.initial_facts.push_back(task.facts.intern(f));
    }
    sort_unique(task.initial_facts);
    task.goal = task.intern_goal_facts(problem.goal);

    task.achievers_.assign(task.num_facts(), {});
    for (auto &a : task.actions)
        for (FactId f : a.add) task.achievers_[f].push_back(a.id);
    for (auto &a : task.actions) task.signature_index_.emplace(a.signature, a.id);
    return task;
}

State GroundTask::initial_state() const {
    State s(num_facts());
    for (FactId f : initial_facts) s.set(f);
    return s;
}

std::optional<ActionId> GroundTask::find_action(const std::string &signature) const {
    auto it = signature_index_.find(lowercase(signature));
    if (it == signature_index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<ActionId> &GroundTask::achievers(FactId f) const {
    if (static_cast<std::size_t>(f) >= achievers_.size())
        achievers_.resize(num_facts());
    return achievers_[f];
}

std::vector<FactId> GroundTask::intern_goal_facts(
    const std::vector<pddl::Atom> &atoms) {
    std::vector<FactId> out;
    for (auto &atom : atoms) {
        const pddl::PredicateDef *pred = domain.find_predicate(atom.predicate);
        if (!pred)
            throw ValidationError("goal: undeclared predicate " + atom.predicate);
        if (pred->params.size() != atom.args.size())
            throw ValidationError("goal: arity mismatch for " +
                                  pddl::to_string(atom));
        GroundFact f;
        f.predicate = facts.predicates.intern(atom.predicate);
        for (auto &arg : atom.args) {
            int obj = facts.objects.find(lowercase(arg));
            if (obj < 0)
                throw ValidationError("goal: undeclared object " + arg + " in " +
                                      pddl::to_string(atom));
            f.args.push_back(obj);
        }
        out.push_back(facts.intern(f));
    }
    sort_unique(out);
    return out;
}

bool applicable(const GroundTask &, const State &state,
                const GroundAction &action) {
    for (FactId f : action.pre)
        if (static_cast<std::size_t>(f) >= state.size() || !state.test(f))
            return false;
    return true;
}

State apply(const GroundTask &task, const State &state,
            const GroundAction &action) {
    if (!applicable(task, state, action))
        throw PreconditionError("action " + action.signature +
                                " is not applicable");
    State next = state;
    for (FactId f : action.del) next.reset(f);
    for (FactId f : action.add) next.set(f);
    return next;
}

bool satisfies(const State &state, const std::vector<FactId> &goal) {
    for (FactId f : goal)
        if (static_cast<std::size_t>(f) >= state.size() || !state.test(f))
            return false;
    return true;
}

State replay(const GroundTask &task, const State &state,
             const std::vector<ActionId> &plan) {
    State s = state;
    for (ActionId id : plan) s = apply(task, s, task.actions[id]);
    return s;
}

} // namespace lmrec
