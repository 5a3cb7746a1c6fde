#pragma once

#include "lmrec/landmarks.hpp"
#include "lmrec/partitions.hpp"
#include "lmrec/task.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lmrec {

// One observed step: a grounded action reference, or a fact set when
// observations are states. Unresolved action observations keep their text and
// are skipped by the matchers (and reported on the problem).
struct Observation {
    std::string text;
    std::optional<ActionId> action;
    std::vector<FactId> facts; // facts-as-observations mode
    bool fact_observation = false;
};

struct GoalRecognitionProblem {
    GroundTask task;
    std::vector<std::vector<FactId>> candidate_goals; // each sorted
    std::vector<Observation> observations;
    std::vector<std::string> unresolved; // report: observation lines that did not resolve
};

// Resolves observation lines (case-insensitive action signatures, or fact
// sexprs with facts_mode) against the grounded task.
GoalRecognitionProblem
make_problem(GroundTask task, std::vector<std::vector<FactId>> candidate_goals,
             const std::vector<std::string> &observation_lines,
             bool facts_mode = false);

struct RecognitionOptions {
    bool score_disjunctive = false;    // include disjunctive landmarks in h_gc/h_uniq sums
    bool literal_partition_test = false; // Alg. 2 line 11 as printed, for comparison
    ExtractOptions extraction;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Extraction product shared by all recognizers; graphs are parallel to
// candidate_goals. Tests may construct this directly from fixture graphs.
struct PreparedRecognition {
    std::vector<LandmarkGraph> graphs;
    double extraction_seconds = 0.0;
};

PreparedRecognition prepare_recognition(const GoalRecognitionProblem &problem,
                                        const RecognitionOptions &options = {});

// Achieved landmarks per goal (bitset over the goal's graph nodes), closed
// under ordering predecessors and monotone across observations. A landmark is
// achieved when it holds in the initial state, when its facts appear in an
// observed action's preconditions plus add effects, or when it holds in the
// running state obtained by applying the observed actions in order
// (disjunctive landmarks need one fact, conjunctive all).
std::vector<Bitset>
compute_achieved_landmarks(const GoalRecognitionProblem &problem,
                           const PreparedRecognition &prepared);

// Goal-completion heuristic: mean over sub-goals g of
// |achieved ∩ supports(g)| / |supports(g)|; in [0, 1].
double h_gc(const LandmarkGraph &graph, const Bitset &achieved,
            bool score_disjunctive = false);

// Uniqueness table: landmark identity is (kind, fact set); the value is the
// inverse number of candidate goals whose graph contains that landmark.
class UniquenessTable {
public:
    static UniquenessTable
    build(const std::vector<const LandmarkGraph *> &graphs);

    double value(const Landmark &lm) const;

private:
    std::map<std::pair<int, std::vector<FactId>>, double> values_;
};

double landmark_uniqueness(const Landmark &landmark,
                           const std::vector<const LandmarkGraph *> &graphs);

// Uniqueness-weighted completion: Σ uniqueness(achieved) / Σ uniqueness(all).
double h_uniq(const LandmarkGraph &graph, const Bitset &achieved,
              const UniquenessTable &table, bool score_disjunctive = false);

struct RecognitionResult {
    std::vector<std::vector<FactId>> goals;
    std::vector<double> scores;     // per goal, in [0, 1]
    std::vector<bool> eliminated;   // pruned by partitions or unsolvable
    std::vector<int> returned;      // goal indices, ascending
    double extraction_seconds = 0.0;
    double recognition_seconds = 0.0;
    bool all_goals_pruned = false;  // filter anomaly: partition pruning ignored

    bool returns_goal(const std::vector<FactId> &goal) const;
    nlohmann::json to_json(const GroundTask &task) const;
};

// The three recognizers. Each returns {G : score(G) >= max - theta} over the
// non-eliminated goals, with scores and timing recorded.
RecognitionResult recognize_gc(const GoalRecognitionProblem &problem,
                               const PreparedRecognition &prepared,
                               double theta,
                               const RecognitionOptions &options = {});
RecognitionResult recognize_uniq(const GoalRecognitionProblem &problem,
                                 const PreparedRecognition &prepared,
                                 double theta,
                                 const RecognitionOptions &options = {});
RecognitionResult filter_candidate_goals(const GoalRecognitionProblem &problem,
                                         const PreparedRecognition &prepared,
                                         double theta,
                                         const RecognitionOptions &options = {});

// Convenience overloads that extract landmarks first (timing included).
RecognitionResult recognize_gc(const GoalRecognitionProblem &problem,
                               double theta,
                               const RecognitionOptions &options = {});
RecognitionResult recognize_uniq(const GoalRecognitionProblem &problem,
                                 double theta,
                                 const RecognitionOptions &options = {});
RecognitionResult filter_candidate_goals(const GoalRecognitionProblem &problem,
                                         double theta,
                                         const RecognitionOptions &options = {});

} // namespace lmrec
