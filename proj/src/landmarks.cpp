#include "lmrec/landmarks.hpp"

#include "lmrec/errors.hpp"
#include "lmrec/sexpr.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <set>

namespace lmrec {

int LandmarkGraph::find(LandmarkKind kind,
                        const std::vector<FactId> &facts) const {
    for (std::size_t i = 0; i < landmarks.size(); ++i)
        if (landmarks[i].kind == kind && landmarks[i].facts == facts)
            return static_cast<int>(i);
    return -1;
}

std::vector<std::vector<int>> LandmarkGraph::predecessors() const {
    std::vector<std::vector<int>> preds(landmarks.size());
    for (auto &[u, v] : edges) preds[v].push_back(u);
    return preds;
}

namespace {

bool fact_in(const std::vector<FactId> &sorted, FactId f) {
    return std::binary_search(sorted.begin(), sorted.end(), f);
}

Bitset removal_set(const GroundTask &task, const std::vector<FactId> &facts) {
    Bitset excluded(task.num_actions());
    for (FactId f : facts)
        for (ActionId a : task.achievers(f)) excluded.set(a);
    return excluded;
}

// Removal test for a candidate: the goal must become relaxed-unsolvable once
// every achiever of the candidate's facts is excluded and the facts
// themselves are dropped from the initial state. Dropping the initial
// occurrences matters for candidates that start true (a landmark that holds
// at the initial state is still unavoidable evidence; without the drop the
// relaxation would bypass it through the initial copy).
bool removal_test(const GroundTask &task, const State &initial,
                  const std::vector<FactId> &goal,
                  const std::vector<FactId> &facts) {
    State test_initial = initial;
    for (FactId f : facts)
        if (static_cast<std::size_t>(f) < test_initial.size())
            test_initial.reset(f);
    return !relaxed_solvable(task, test_initial, goal,
                             removal_set(task, facts));
}

// A fact that no action adds or deletes is rigid; rigid facts are dropped
// from landmark candidates (they carry no plan progress information).
std::vector<bool> rigid_facts(const GroundTask &task) {
    std::vector<bool> touched(task.num_facts(), false);
    for (auto &a : task.actions) {
        for (FactId f : a.add) touched[f] = true;
        for (FactId f : a.del) touched[f] = true;
    }
    std::vector<bool> rigid(task.num_facts());
    for (std::size_t f = 0; f < rigid.size(); ++f) rigid[f] = !touched[f];
    return rigid;
}

class Extractor {
public:
    Extractor(const GroundTask &task, const State &initial,
              const std::vector<FactId> &goal, const ExtractOptions &options)
        : task_(task), initial_(initial), goal_(goal), options_(options),
          rigid_(rigid_facts(task)) {}

    LandmarkGraph run() {
        if (goal_.size() > 64)
            throw ValidationError("goal has more than 64 facts");
        Bitset none;
        base_rpg_ = build_rpg(task_, initial_, none);
        if (!base_rpg_.reachable_all(goal_))
            throw UnsolvableGoalError("goal is not relaxed-solvable");

        graph_.goal = goal_;
        for (FactId g : goal_) {
            int idx = add_node(LandmarkKind::Conjunctive, {g});
            queue_.push_back(idx);
        }
        while (!queue_.empty()) {
            int node = queue_.front();
            queue_.pop_front();
            expand(node);
        }
        compute_supports();
        return std::move(graph_);
    }

private:
    int add_node(LandmarkKind kind, std::vector<FactId> facts) {
        int idx = graph_.find(kind, facts);
        if (idx >= 0) return idx;
        idx = static_cast<int>(graph_.landmarks.size());
        graph_.landmarks.push_back({kind, std::move(facts), 0});
        return idx;
    }

    bool has_path(int from, int to) const {
        if (from == to) return true;
        std::vector<int> stack{from};
        std::set<int> seen{from};
        auto succs = std::vector<std::vector<int>>(graph_.landmarks.size());
        for (auto &[u, v] : graph_.edges) succs[u].push_back(v);
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            for (int s : succs[n]) {
                if (s == to) return true;
                if (seen.insert(s).second) stack.push_back(s);
            }
        }
        return false;
    }

    void link(int pred, int succ) {
        if (pred == succ) return;
        for (auto &[u, v] : graph_.edges)
            if (u == pred && v == succ) return;
        if (has_path(succ, pred)) return; // keep the graph acyclic
        graph_.edges.emplace_back(pred, succ);
    }

    // Adds a verified candidate, links it below `parent`, and queues fresh
    // conjunctive nodes for further back-chaining.
    void add_candidate(LandmarkKind kind, std::vector<FactId> facts, int parent) {
        int existing = graph_.find(kind, facts);
        if (existing >= 0) {
            link(existing, parent);
            return;
        }
        int idx = add_node(kind, std::move(facts));
        link(idx, parent);
        if (kind == LandmarkKind::Conjunctive) queue_.push_back(idx);
    }

    bool fact_is_landmark(FactId f) {
        if (fact_in(goal_, f)) return true;
        auto it = fact_cache_.find(f);
        if (it != fact_cache_.end()) return it->second;
        bool res = removal_test(task_, initial_, goal_, {f});
        fact_cache_.emplace(f, res);
        return res;
    }

    // Conjunction kept if each member fact is individually a verified
    // landmark, falling back to the joint removal test.
    bool verify_conjunction(const std::vector<FactId> &facts) {
        bool all = true;
        for (FactId f : facts)
            if (!fact_is_landmark(f)) {
                all = false;
                break;
            }
        if (all) return true;
        return removal_test(task_, initial_, goal_, facts);
    }

    void expand(int node_index) {
        // The node's facts vector may move as the graph grows; copy it.
        std::vector<FactId> facts = graph_.landmarks[node_index].facts;
        for (FactId f : facts) {
            if (initial_.test(f) || !base_rpg_.reachable(f)) continue;
            const std::vector<ActionId> &all = task_.achievers(f);
            if (all.empty()) continue;

            // Possible first achievers: achievers whose preconditions are
            // still relaxed-reachable after every achiever of f is removed.
            // Any real plan's first achievement of f uses one of these.
            RelaxedPlanningGraph removal_rpg =
                build_rpg(task_, initial_, removal_set(task_, {f}));
            std::vector<ActionId> first;
            for (ActionId aid : all)
                if (removal_rpg.reachable_all(task_.actions[aid].pre))
                    first.push_back(aid);
            // A reachable fact always has a possible first achiever: the
            // relaxed plan's prefix before its first achiever contains none
            // of the excluded actions.
            assert(!first.empty());
            if (first.empty()) continue;

            std::vector<FactId> shared = task_.actions[first[0]].pre;
            for (std::size_t i = 1; i < first.size(); ++i) {
                std::vector<FactId> next;
                const auto &pre = task_.actions[first[i]].pre;
                std::set_intersection(shared.begin(), shared.end(), pre.begin(),
                                      pre.end(), std::back_inserter(next));
                shared = std::move(next);
            }
            std::vector<FactId> shared_fluent;
            for (FactId p : shared)
                if (!rigid_[p]) shared_fluent.push_back(p);

            if (!shared_fluent.empty() && verify_conjunction(shared_fluent))
                add_candidate(LandmarkKind::Conjunctive, shared_fluent,
                              node_index);

            if (options_.disjunctive && first.size() > 1)
                disjunctive_candidates(first, shared, node_index);
        }
    }

    void disjunctive_candidates(const std::vector<ActionId> &first,
                                const std::vector<FactId> &shared,
                                int node_index) {
        // Group the non-shared preconditions by predicate; a predicate forms
        // a disjunctive candidate when every first achiever contributes at
        // least one fact of that predicate.
        std::set<int> predicates;
        for (ActionId aid : first)
            for (FactId p : task_.actions[aid].pre)
                if (!fact_in(shared, p) && !rigid_[p])
                    predicates.insert(task_.facts.fact(p).predicate);
        for (int pred : predicates) {
            std::set<FactId> disj;
            bool every = true;
            for (ActionId aid : first) {
                bool contributed = false;
                for (FactId p : task_.actions[aid].pre)
                    if (!fact_in(shared, p) && !rigid_[p] &&
                        task_.facts.fact(p).predicate == pred) {
                        disj.insert(p);
                        contributed = true;
                    }
                if (!contributed) {
                    every = false;
                    break;
                }
            }
            if (!every || disj.size() < 2 ||
                disj.size() > options_.max_disjunction_size)
                continue;
            std::vector<FactId> facts(disj.begin(), disj.end());
            Landmark cand{LandmarkKind::Disjunctive, facts, 0};
            if (verify_candidate(task_, cand, initial_, goal_))
                add_candidate(LandmarkKind::Disjunctive, std::move(facts),
                              node_index);
        }
    }

    // supports(L) = sub-goals whose singleton node is reachable from L along
    // ordering edges (L was extracted somewhere in that sub-goal's chain).
    void compute_supports() {
        std::vector<std::vector<int>> preds = graph_.predecessors();
        for (std::size_t i = 0; i < graph_.goal.size(); ++i) {
            int root = graph_.find(LandmarkKind::Conjunctive, {graph_.goal[i]});
            assert(root >= 0);
            std::vector<int> stack{root};
            std::set<int> seen{root};
            while (!stack.empty()) {
                int n = stack.back();
                stack.pop_back();
                graph_.landmarks[n].supports |= std::uint64_t(1) << i;
                for (int p : preds[n])
                    if (seen.insert(p).second) stack.push_back(p);
            }
        }
    }

    const GroundTask &task_;
    const State &initial_;
    const std::vector<FactId> &goal_;
    ExtractOptions options_;
    std::vector<bool> rigid_;
    RelaxedPlanningGraph base_rpg_;
    LandmarkGraph graph_;
    std::deque<int> queue_;
    std::map<FactId, bool> fact_cache_;
};

} // namespace

LandmarkGraph extract_landmarks(const GroundTask &task, const State &initial,
                                const std::vector<FactId> &goal,
                                const ExtractOptions &options) {
    Extractor ex(task, initial, goal, options);
    return ex.run();
}

bool verify_candidate(const GroundTask &task, const Landmark &candidate,
                      const State &initial, const std::vector<FactId> &goal) {
    bool all_goal = true;
    for (FactId f : candidate.facts)
        if (!fact_in(goal, f)) {
            all_goal = false;
            break;
        }
    if (all_goal) return true;
    return removal_test(task, initial, goal, candidate.facts);
}

std::map<std::vector<FactId>, LandmarkGraph>
extract_for_goals(const GroundTask &task, const State &initial,
                  const std::vector<std::vector<FactId>> &goals,
                  const ExtractOptions &options) {
    std::map<std::vector<FactId>, LandmarkGraph> out;
    for (const auto &goal : goals) {
        if (out.count(goal)) continue;
        try {
            out.emplace(goal, extract_landmarks(task, initial, goal, options));
        } catch (const UnsolvableGoalError &) {
            LandmarkGraph marker;
            marker.goal = goal;
            marker.solvable = false;
            out.emplace(goal, std::move(marker));
        }
    }
    return out;
}

std::string to_listing(const LandmarkGraph &graph, const GroundTask &task) {
    std::string out = "Fact Landmarks:\n";
    for (auto &lm : graph.landmarks) {
        out += lm.kind == LandmarkKind::Conjunctive ? "(and" : "(or";
        for (FactId f : lm.facts) out += " " + task.fact_name(f);
        out += ")\n";
    }
    return out;
}

nlohmann::json graph_to_json(const LandmarkGraph &graph, const GroundTask &task) {
    nlohmann::json j;
    j["goal"] = nlohmann::json::array();
    for (FactId f : graph.goal) j["goal"].push_back(task.fact_name(f));
    j["solvable"] = graph.solvable;
    j["landmarks"] = nlohmann::json::array();
    for (auto &lm : graph.landmarks) {
        nlohmann::json e;
        e["kind"] = lm.kind == LandmarkKind::Conjunctive ? "and" : "or";
        e["facts"] = nlohmann::json::array();
        for (FactId f : lm.facts) e["facts"].push_back(task.fact_name(f));
        e["supports"] = nlohmann::json::array();
        for (std::size_t i = 0; i < graph.goal.size(); ++i)
            if (lm.supports_subgoal(static_cast<int>(i)))
                e["supports"].push_back(task.fact_name(graph.goal[i]));
        j["landmarks"].push_back(std::move(e));
    }
    j["edges"] = graph.edges;
    return j;
}

namespace {

FactId resolve_fact(const std::string &text, GroundTask &task) {
    Sexpr e = read_sexpr(text);
    pddl::Atom atom;
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
        throw ValidationError("bad fact in landmark JSON: " + text);
    atom.predicate = e.items[0].symbol;
    for (std::size_t i = 1; i < e.items.size(); ++i)
        atom.args.push_back(e.items[i].symbol);
    auto ids = task.intern_goal_facts({atom});
    return ids.at(0);
}

} // namespace

LandmarkGraph graph_from_json(const nlohmann::json &j, GroundTask &task) {
    LandmarkGraph g;
    for (auto &f : j.at("goal")) g.goal.push_back(resolve_fact(f, task));
    std::sort(g.goal.begin(), g.goal.end());
    g.solvable = j.value("solvable", true);
    bool explicit_supports = false;
    for (auto &e : j.at("landmarks")) {
        Landmark lm;
        lm.kind = e.at("kind") == "or" ? LandmarkKind::Disjunctive
                                       : LandmarkKind::Conjunctive;
        for (auto &f : e.at("facts")) lm.facts.push_back(resolve_fact(f, task));
        std::sort(lm.facts.begin(), lm.facts.end());
        if (e.contains("supports")) {
            explicit_supports = true;
            for (auto &f : e.at("supports")) {
                FactId fid = resolve_fact(f, task);
                auto it = std::find(g.goal.begin(), g.goal.end(), fid);
                if (it == g.goal.end())
                    throw ValidationError("landmark JSON: support " +
                                          std::string(f) + " is not a goal fact");
                lm.supports |= std::uint64_t(1)
                               << std::distance(g.goal.begin(), it);
            }
        }
        g.landmarks.push_back(std::move(lm));
    }
    if (j.contains("edges"))
        for (auto &e : j.at("edges"))
            g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());

    if (g.solvable)
        for (FactId f : g.goal)
            if (g.find(LandmarkKind::Conjunctive, {f}) < 0)
                throw ValidationError(
                    "landmark JSON: goal fact " + task.fact_name(f) +
                    " has no singleton landmark node");

    if (!explicit_supports) {
        auto preds = g.predecessors();
        for (std::size_t i = 0; i < g.goal.size(); ++i) {
            int root = g.find(LandmarkKind::Conjunctive, {g.goal[i]});
            if (root < 0) continue;
            std::vector<int> stack{root};
            std::set<int> seen{root};
            while (!stack.empty()) {
                int n = stack.back();
                stack.pop_back();
                g.landmarks[n].supports |= std::uint64_t(1) << i;
                for (int p : preds[n])
                    if (seen.insert(p).second) stack.push_back(p);
            }
        }
    }
    return g;
}

} // namespace lmrec
