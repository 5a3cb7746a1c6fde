#include "lmrec/recognition.hpp"

#include "lmrec/errors.hpp"
#include "lmrec/sexpr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace lmrec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_deadline(const RecognitionOptions &options) {
    if (options.deadline && Clock::now() > *options.deadline)
        throw TimeoutError("recognition timeout exceeded");
}

bool holds_in_state(const Landmark &lm, const State &s) {
    if (lm.kind == LandmarkKind::Conjunctive) {
        for (FactId f : lm.facts)
            if (static_cast<std::size_t>(f) >= s.size() || !s.test(f))
                return false;
        return true;
    }
    for (FactId f : lm.facts)
        if (static_cast<std::size_t>(f) < s.size() && s.test(f)) return true;
    return false;
}

bool holds_in_set(const Landmark &lm, const std::vector<FactId> &sorted) {
    if (lm.kind == LandmarkKind::Conjunctive) {
        for (FactId f : lm.facts)
            if (!std::binary_search(sorted.begin(), sorted.end(), f))
                return false;
        return true;
    }
    for (FactId f : lm.facts)
        if (std::binary_search(sorted.begin(), sorted.end(), f)) return true;
    return false;
}

void close_under_predecessors(const std::vector<std::vector<int>> &preds,
                              Bitset &achieved) {
    std::vector<int> stack;
    for (std::size_t n = 0; n < preds.size(); ++n)
        if (achieved.test(n)) stack.push_back(static_cast<int>(n));
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (int p : preds[n])
            if (!achieved.test(p)) {
                achieved.set(p);
                stack.push_back(p);
            }
    }
}

// Marks everything evidenced by one observed action: the action's
// preconditions plus add effects, and the progressed state after applying it.
void mark_action_evidence(const GroundAction &action,
                          const LandmarkGraph &graph, State &progressed,
                          Bitset &achieved) {
    std::vector<FactId> evidence = action.pre;
    evidence.insert(evidence.end(), action.add.begin(), action.add.end());
    std::sort(evidence.begin(), evidence.end());
    evidence.erase(std::unique(evidence.begin(), evidence.end()),
                   evidence.end());
    for (FactId f : action.del)
        if (static_cast<std::size_t>(f) < progressed.size())
            progressed.reset(f);
    for (FactId f : action.add)
        if (static_cast<std::size_t>(f) < progressed.size())
            progressed.set(f);
    for (std::size_t n = 0; n < graph.landmarks.size(); ++n) {
        if (achieved.test(n)) continue;
        const Landmark &lm = graph.landmarks[n];
        if (holds_in_set(lm, evidence) || holds_in_state(lm, progressed))
            achieved.set(n);
    }
}

Bitset achieved_for_goal(const GoalRecognitionProblem &problem,
                         const LandmarkGraph &graph) {
    Bitset achieved(graph.landmarks.size());
    if (!graph.solvable) return achieved;
    State initial = problem.task.initial_state();
    auto preds = graph.predecessors();

    for (std::size_t n = 0; n < graph.landmarks.size(); ++n)
        if (holds_in_state(graph.landmarks[n], initial)) achieved.set(n);
    close_under_predecessors(preds, achieved);

    State progressed = initial;
    for (const Observation &obs : problem.observations) {
        if (obs.fact_observation) {
            for (std::size_t n = 0; n < graph.landmarks.size(); ++n)
                if (!achieved.test(n) &&
                    holds_in_set(graph.landmarks[n], obs.facts))
                    achieved.set(n);
        } else if (obs.action) {
            mark_action_evidence(problem.task.actions[*obs.action], graph,
                                 progressed, achieved);
        }
        close_under_predecessors(preds, achieved);
    }
    return achieved;
}

} // namespace

GoalRecognitionProblem
make_problem(GroundTask task, std::vector<std::vector<FactId>> candidate_goals,
             const std::vector<std::string> &observation_lines,
             bool facts_mode) {
    GoalRecognitionProblem p;
    p.task = std::move(task);
    p.candidate_goals = std::move(candidate_goals);
    if (p.candidate_goals.empty())
        throw ValidationError("candidate goal set is empty");
    for (const std::string &line : observation_lines) {
        Observation obs;
        obs.text = line;
        if (facts_mode) {
            obs.fact_observation = true;
            std::vector<pddl::Atom> atoms;
            for (const Sexpr &e : read_sexprs(line)) {
                if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol()) {
                    p.unresolved.push_back(line);
                    atoms.clear();
                    break;
                }
                pddl::Atom a;
                a.predicate = e.items[0].symbol;
                for (std::size_t i = 1; i < e.items.size(); ++i)
                    a.args.push_back(e.items[i].symbol);
                atoms.push_back(std::move(a));
            }
            if (!atoms.empty()) {
                try {
                    obs.facts = p.task.intern_goal_facts(atoms);
                } catch (const ValidationError &) {
                    p.unresolved.push_back(line);
                }
            }
        } else {
            // Normalize "(name a b)" whitespace through the sexpr reader.
            std::string normalized;
            try {
                Sexpr e = read_sexpr(line);
                normalized = "(";
                for (std::size_t i = 0; i < e.items.size(); ++i) {
                    if (i) normalized += " ";
                    normalized += e.items[i].symbol;
                }
                normalized += ")";
            } catch (const ParseError &) {
                normalized = line;
            }
            obs.action = p.task.find_action(normalized);
            if (!obs.action) p.unresolved.push_back(line);
        }
        p.observations.push_back(std::move(obs));
    }
    return p;
}

PreparedRecognition prepare_recognition(const GoalRecognitionProblem &problem,
                                        const RecognitionOptions &options) {
    PreparedRecognition prepared;
    auto start = Clock::now();
    State initial = problem.task.initial_state();
    for (const auto &goal : problem.candidate_goals) {
        check_deadline(options);
        try {
            prepared.graphs.push_back(extract_landmarks(
                problem.task, initial, goal, options.extraction));
        } catch (const UnsolvableGoalError &) {
            LandmarkGraph marker;
            marker.goal = goal;
            marker.solvable = false;
            prepared.graphs.push_back(std::move(marker));
        }
    }
    prepared.extraction_seconds = seconds_since(start);
    return prepared;
}

std::vector<Bitset>
compute_achieved_landmarks(const GoalRecognitionProblem &problem,
                           const PreparedRecognition &prepared) {
    assert(prepared.graphs.size() == problem.candidate_goals.size());
    std::vector<Bitset> out;
    out.reserve(prepared.graphs.size());
    for (const auto &graph : prepared.graphs)
        out.push_back(achieved_for_goal(problem, graph));
    return out;
}

double h_gc(const LandmarkGraph &graph, const Bitset &achieved,
            bool score_disjunctive) {
    assert(!graph.goal.empty());
    double sum = 0.0;
    for (std::size_t g = 0; g < graph.goal.size(); ++g) {
        int total = 0;
        int done = 0;
        for (std::size_t n = 0; n < graph.landmarks.size(); ++n) {
            const Landmark &lm = graph.landmarks[n];
            if (!score_disjunctive && lm.kind == LandmarkKind::Disjunctive)
                continue;
            if (!lm.supports_subgoal(static_cast<int>(g))) continue;
            ++total;
            if (achieved.test(n)) ++done;
        }
        // Every sub-goal supports at least its own singleton landmark.
        assert(total > 0);
        sum += static_cast<double>(done) / static_cast<double>(total);
    }
    return sum / static_cast<double>(graph.goal.size());
}

UniquenessTable
UniquenessTable::build(const std::vector<const LandmarkGraph *> &graphs) {
    UniquenessTable t;
    std::map<std::pair<int, std::vector<FactId>>, int> counts;
    for (const LandmarkGraph *g : graphs)
        for (const Landmark &lm : g->landmarks)
            ++counts[{static_cast<int>(lm.kind), lm.facts}];
    for (auto &[key, count] : counts) t.values_[key] = 1.0 / count;
    return t;
}

double UniquenessTable::value(const Landmark &lm) const {
    auto it = values_.find({static_cast<int>(lm.kind), lm.facts});
    return it == values_.end() ? 0.0 : it->second;
}

double landmark_uniqueness(const Landmark &landmark,
                           const std::vector<const LandmarkGraph *> &graphs) {
    int count = 0;
    for (const LandmarkGraph *g : graphs)
        if (g->find(landmark.kind, landmark.facts) >= 0) ++count;
    assert(count > 0);
    return 1.0 / count;
}

double h_uniq(const LandmarkGraph &graph, const Bitset &achieved,
              const UniquenessTable &table, bool score_disjunctive) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < graph.landmarks.size(); ++n) {
        const Landmark &lm = graph.landmarks[n];
        if (!score_disjunctive && lm.kind == LandmarkKind::Disjunctive)
            continue;
        double v = table.value(lm);
        den += v;
        if (achieved.test(n)) num += v;
    }
    assert(den > 0.0);
    return num / den;
}

bool RecognitionResult::returns_goal(const std::vector<FactId> &goal) const {
    for (int i : returned)
        if (goals[i] == goal) return true;
    return false;
}

nlohmann::json RecognitionResult::to_json(const GroundTask &task) const {
    nlohmann::json j;
    j["goals"] = nlohmann::json::array();
    for (auto &g : goals) {
        nlohmann::json facts = nlohmann::json::array();
        for (FactId f : g) facts.push_back(task.fact_name(f));
        j["goals"].push_back(std::move(facts));
    }
    j["scores"] = scores;
    j["eliminated"] = eliminated;
    j["returned"] = returned;
    j["extraction_seconds"] = extraction_seconds;
    j["recognition_seconds"] = recognition_seconds;
    j["all_goals_pruned"] = all_goals_pruned;
    return j;
}

namespace {

RecognitionResult assemble(const GoalRecognitionProblem &problem,
                           std::vector<double> scores,
                           std::vector<bool> eliminated, double theta) {
    RecognitionResult r;
    r.goals = problem.candidate_goals;
    r.scores = std::move(scores);
    r.eliminated = std::move(eliminated);
    double maxh = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < r.scores.size(); ++i)
        if (!r.eliminated[i]) {
            maxh = any ? std::max(maxh, r.scores[i]) : r.scores[i];
            any = true;
        }
    if (any) {
        constexpr double kEps = 1e-9; // guard float noise at the threshold
        for (std::size_t i = 0; i < r.scores.size(); ++i)
            if (!r.eliminated[i] && r.scores[i] >= maxh - theta - kEps)
                r.returned.push_back(static_cast<int>(i));
    }
    return r;
}

template <typename ScoreFn>
RecognitionResult run_heuristic(const GoalRecognitionProblem &problem,
                                const PreparedRecognition &prepared,
                                double theta, ScoreFn &&score) {
    auto start = Clock::now();
    std::vector<Bitset> achieved = compute_achieved_landmarks(problem, prepared);
    std::vector<double> scores(problem.candidate_goals.size(), 0.0);
    std::vector<bool> eliminated(problem.candidate_goals.size(), false);
    for (std::size_t i = 0; i < prepared.graphs.size(); ++i) {
        if (!prepared.graphs[i].solvable) {
            eliminated[i] = true; // unsolvable goal: score 0, flagged
            continue;
        }
        scores[i] = score(prepared.graphs[i], achieved[i]);
    }
    RecognitionResult r = assemble(problem, std::move(scores),
                                   std::move(eliminated), theta);
    r.extraction_seconds = prepared.extraction_seconds;
    r.recognition_seconds = seconds_since(start);
    return r;
}

} // namespace

RecognitionResult recognize_gc(const GoalRecognitionProblem &problem,
                               const PreparedRecognition &prepared,
                               double theta, const RecognitionOptions &options) {
    return run_heuristic(problem, prepared, theta,
                         [&](const LandmarkGraph &g, const Bitset &a) {
                             return h_gc(g, a, options.score_disjunctive);
                         });
}

RecognitionResult recognize_uniq(const GoalRecognitionProblem &problem,
                                 const PreparedRecognition &prepared,
                                 double theta,
                                 const RecognitionOptions &options) {
    std::vector<const LandmarkGraph *> ptrs;
    for (const auto &g : prepared.graphs)
        if (g.solvable) ptrs.push_back(&g);
    UniquenessTable table = UniquenessTable::build(ptrs);
    return run_heuristic(problem, prepared, theta,
                         [&](const LandmarkGraph &g, const Bitset &a) {
                             return h_uniq(g, a, table,
                                           options.score_disjunctive);
                         });
}

namespace {

// Landmark-aware reading of the partition tests: an observed delete of an
// unstable-activating landmark fact that was not yet consumed kills the goal;
// an observed add of a strictly-terminal fact foreign to the goal kills it
// too. The literal reading tests whole-set inclusion against one observation.
struct PartitionPruner {
    const GroundTask &task;
    FactPartitions action_only; // partitions without the I-requirement
    State initial;

    explicit PartitionPruner(const GroundTask &t)
        : task(t),
          action_only(partition_facts(t, t.initial_state(), false)),
          initial(t.initial_state()) {}

    bool strictly_activating_violated(const LandmarkGraph &graph) const {
        for (const Landmark &lm : graph.landmarks)
            for (FactId f : lm.facts)
                if (action_only.strictly_activating.test(f) && !initial.test(f))
                    return true;
        return false;
    }

    bool observation_violates(const LandmarkGraph &graph, const Bitset &achieved,
                              const std::vector<FactId> &goal,
                              const GroundAction &action, bool literal) const {
        if (literal) {
            std::vector<FactId> all = action.pre;
            all.insert(all.end(), action.add.begin(), action.add.end());
            all.insert(all.end(), action.del.begin(), action.del.end());
            std::sort(all.begin(), all.end());
            bool any_partition_fact = false;
            bool all_in = true;
            for (std::size_t f = 0; f < task.num_facts(); ++f) {
                bool in_partitions = (action_only.unstable_activating.test(f) &&
                                      initial.test(f)) ||
                                     action_only.strictly_terminal.test(f);
                if (!in_partitions) continue;
                any_partition_fact = true;
                if (!std::binary_search(all.begin(), all.end(),
                                        static_cast<FactId>(f)))
                    all_in = false;
            }
            return any_partition_fact && all_in;
        }
        // Unstable activating: deleted before every landmark needing it was
        // achieved, or deleted while being a sub-goal fact (never re-achievable).
        for (FactId f : action.del) {
            if (!action_only.unstable_activating.test(f) || !initial.test(f))
                continue;
            if (std::binary_search(goal.begin(), goal.end(), f)) return true;
            for (std::size_t n = 0; n < graph.landmarks.size(); ++n)
                if (!achieved.test(n) &&
                    std::find(graph.landmarks[n].facts.begin(),
                              graph.landmarks[n].facts.end(),
                              f) != graph.landmarks[n].facts.end())
                    return true;
        }
        // Strictly terminal: an irreversible fact was added that this goal
        // never needs.
        for (FactId f : action.add) {
            if (!action_only.strictly_terminal.test(f)) continue;
            if (std::binary_search(goal.begin(), goal.end(), f)) continue;
            bool in_landmarks = false;
            for (const Landmark &lm : graph.landmarks)
                if (std::find(lm.facts.begin(), lm.facts.end(), f) !=
                    lm.facts.end()) {
                    in_landmarks = true;
                    break;
                }
            if (!in_landmarks) return true;
        }
        return false;
    }
};

} // namespace

RecognitionResult filter_candidate_goals(const GoalRecognitionProblem &problem,
                                         const PreparedRecognition &prepared,
                                         double theta,
                                         const RecognitionOptions &options) {
    auto start = Clock::now();
    PartitionPruner pruner(problem.task);
    std::size_t n_goals = problem.candidate_goals.size();
    std::vector<double> ratios(n_goals, 0.0);
    std::vector<bool> eliminated(n_goals, false);
    std::vector<bool> pruned_by_partitions(n_goals, false);

    State initial = problem.task.initial_state();
    for (std::size_t i = 0; i < n_goals; ++i) {
        const LandmarkGraph &graph = prepared.graphs[i];
        if (!graph.solvable) {
            eliminated[i] = true;
            continue;
        }
        if (pruner.strictly_activating_violated(graph)) {
            eliminated[i] = true;
            pruned_by_partitions[i] = true;
            continue;
        }
        Bitset achieved(graph.landmarks.size());
        auto preds = graph.predecessors();
        for (std::size_t n = 0; n < graph.landmarks.size(); ++n)
            if (holds_in_state(graph.landmarks[n], initial)) achieved.set(n);
        close_under_predecessors(preds, achieved);

        State progressed = initial;
        bool discard = false;
        for (const Observation &obs : problem.observations) {
            if (obs.fact_observation) {
                for (std::size_t n = 0; n < graph.landmarks.size(); ++n)
                    if (!achieved.test(n) &&
                        holds_in_set(graph.landmarks[n], obs.facts))
                        achieved.set(n);
                close_under_predecessors(preds, achieved);
                continue;
            }
            if (!obs.action) continue;
            const GroundAction &action = problem.task.actions[*obs.action];
            if (pruner.observation_violates(graph, achieved,
                                            problem.candidate_goals[i], action,
                                            options.literal_partition_test)) {
                discard = true;
                break;
            }
            mark_action_evidence(action, graph, progressed, achieved);
            close_under_predecessors(preds, achieved);
        }
        if (discard) {
            eliminated[i] = true;
            pruned_by_partitions[i] = true;
            continue;
        }
        ratios[i] = graph.num_units() == 0
                        ? 1.0
                        : static_cast<double>(achieved.count()) /
                              static_cast<double>(graph.num_units());
    }

    bool all_pruned = true;
    for (std::size_t i = 0; i < n_goals; ++i)
        if (!eliminated[i]) all_pruned = false;
    if (all_pruned) {
        // Every goal was discarded: fall back to the ratio ranking without
        // partition pruning and flag the anomaly.
        std::vector<Bitset> achieved =
            compute_achieved_landmarks(problem, prepared);
        for (std::size_t i = 0; i < n_goals; ++i) {
            if (!prepared.graphs[i].solvable || !pruned_by_partitions[i])
                continue;
            eliminated[i] = false;
            ratios[i] = prepared.graphs[i].num_units() == 0
                            ? 1.0
                            : static_cast<double>(achieved[i].count()) /
                                  static_cast<double>(
                                      prepared.graphs[i].num_units());
        }
    }

    RecognitionResult r =
        assemble(problem, std::move(ratios), std::move(eliminated), theta);
    r.all_goals_pruned = all_pruned;
    r.extraction_seconds = prepared.extraction_seconds;
    r.recognition_seconds = seconds_since(start);
    return r;
}

RecognitionResult recognize_gc(const GoalRecognitionProblem &problem,
                               double theta, const RecognitionOptions &options) {
    return recognize_gc(problem, prepare_recognition(problem, options), theta,
                        options);
}

RecognitionResult recognize_uniq(const GoalRecognitionProblem &problem,
                                 double theta,
                                 const RecognitionOptions &options) {
    return recognize_uniq(problem, prepare_recognition(problem, options), theta,
                          options);
}

RecognitionResult filter_candidate_goals(const GoalRecognitionProblem &problem,
                                         double theta,
                                         const RecognitionOptions &options) {
    return filter_candidate_goals(problem, prepare_recognition(problem, options),
                                  theta, options);
}

} // namespace lmrec
