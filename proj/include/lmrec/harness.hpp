#pragma once

#include "lmrec/obsgen.hpp"
#include "lmrec/recognition.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lmrec {

// Ramirez-Geffner dataset bundle convention: per-problem directory with a
// domain, a problem template whose goal holds a <HYPOTHESIS> token, one
// candidate goal per hyps.dat line (fluents comma-separated), one observed
// action signature per obs.dat line, and the hidden goal in real_hyp.dat.
struct BundlePaths {
    std::filesystem::path domain = "domain.pddl";
    std::filesystem::path template_problem = "template.pddl";
    std::filesystem::path hypotheses = "hyps.dat";
    std::filesystem::path observations = "obs.dat";
    std::filesystem::path real_hypothesis = "real_hyp.dat";

    BundlePaths resolved(const std::filesystem::path &dir) const;
};

struct LoadedBundle {
    GoalRecognitionProblem problem;
    std::optional<int> real_goal; // index into problem.candidate_goals
    std::string domain_name;
    double observability = -1.0; // from meta.json when present
    int noise = -1;
};

LoadedBundle load_bundle(const BundlePaths &paths, bool facts_mode = false);

struct ProblemRow {
    std::string bundle;
    std::string domain;
    double observability = -1.0;
    int num_goals = 0;
    int num_obs = 0;
    std::string method;
    double theta = 0.0;
    double time_s = 0.0;
    bool correct = false; // real goal among returned
    int spread = 0;
    double fpr = 0.0; // (|returned| - [G* returned]) / (|goals| - 1)
    bool failed = false;
    std::string error;
};

struct Aggregate {
    std::string domain;
    double observability = -1.0;
    std::string method;
    double theta = 0.0;
    int problems = 0;
    double accuracy = 0.0;
    double mean_spread = 0.0;
    double mean_time = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct MetricsReport {
    std::vector<ProblemRow> rows;
    std::vector<Aggregate> aggregates;
    int failed_problems = 0;

    void compute_aggregates();
};

struct RunOptions {
    double timeout_seconds = 1200.0; // per problem; LMREC_TIMEOUT_S overrides
    bool facts_mode = false;
    RecognitionOptions recognition;
};

double default_timeout_seconds();

// method is one of "gc", "uniq", "filter". Timing covers extraction plus
// recognition, not file I/O.
ProblemRow run_problem(const LoadedBundle &bundle, const std::string &method,
                       double theta, const RunOptions &options = {});

// Runs every bundle under `root` (any directory holding the bundle files)
// against every method and theta. Failed problems are logged in rows and
// excluded from aggregates.
MetricsReport evaluate(const std::filesystem::path &root,
                       const std::vector<std::string> &methods,
                       const std::vector<double> &thetas,
                       const RunOptions &options = {}, int workers = 1);

std::vector<std::filesystem::path>
find_bundles(const std::filesystem::path &root);

// Stable column order, floats with 3 decimals, deterministic row order.
std::string report_to_csv(const MetricsReport &report);
nlohmann::json report_to_json(const MetricsReport &report);
void emit_report(const MetricsReport &report, const std::string &format,
                 const std::filesystem::path &file);

struct GenDatasetRequest {
    std::filesystem::path domain_file;
    std::filesystem::path template_file;
    std::filesystem::path hypotheses_file;
    int real_hypothesis = 0; // index into the hypotheses file
    ObservationSpec spec;
    std::filesystem::path out_dir;
    PlannerLimits limits;
};

// Plans for the real hypothesis, derives the observation sequence, and writes
// a bundle in the layout above (plus meta.json with the generation
// parameters). Deterministic: a seed reproduces byte-identical bundles.
void gen_dataset(const GenDatasetRequest &request);

} // namespace lmrec
