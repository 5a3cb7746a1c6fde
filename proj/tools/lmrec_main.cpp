#include "lmrec/errors.hpp"
#include "lmrec/harness.hpp"
#include "lmrec/landmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace {

using namespace lmrec;

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int cmd_recognize(const std::string &domain, const std::string &tmpl,
                  const std::string &hyps, const std::string &obs,
                  const std::string &real, const std::string &method,
                  double theta, bool facts_obs, bool json_out,
                  double timeout_s) {
    BundlePaths paths;
    paths.domain = domain;
    paths.template_problem = tmpl;
    paths.hypotheses = hyps;
    paths.observations = obs;
    paths.real_hypothesis = real; // empty: no correctness check
    LoadedBundle bundle = load_bundle(paths, facts_obs);

    RecognitionOptions ropts;
    ropts.deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(timeout_s));
    RecognitionResult result;
    if (method == "gc")
        result = recognize_gc(bundle.problem, theta, ropts);
    else if (method == "uniq")
        result = recognize_uniq(bundle.problem, theta, ropts);
    else
        result = filter_candidate_goals(bundle.problem, theta, ropts);

    if (json_out) {
        auto j = result.to_json(bundle.problem.task);
        if (bundle.real_goal) j["real_goal"] = *bundle.real_goal;
        j["unresolved_observations"] = bundle.problem.unresolved;
        std::cout << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < result.goals.size(); ++i) {
            bool in_returned =
                std::find(result.returned.begin(), result.returned.end(),
                          static_cast<int>(i)) != result.returned.end();
            std::string facts;
            for (FactId f : result.goals[i])
                facts += bundle.problem.task.fact_name(f) + " ";
            std::printf("%c goal %zu: score %.3f%s  %s\n",
                        in_returned ? '*' : ' ', i, result.scores[i],
                        result.eliminated[i] ? " (eliminated)" : "",
                        facts.c_str());
        }
        std::printf("extraction %.3fs, recognition %.3fs\n",
                    result.extraction_seconds, result.recognition_seconds);
        for (auto &u : bundle.problem.unresolved)
            std::fprintf(stderr, "warning: unresolved observation: %s\n",
                         u.c_str());
    }
    if (bundle.real_goal) {
        bool correct = std::find(result.returned.begin(), result.returned.end(),
                                 *bundle.real_goal) != result.returned.end();
        return correct ? 0 : 1;
    }
    return 0;
}

int cmd_landmarks(const std::string &domain_file, const std::string &tmpl_file,
                  const std::string &hyps_file, bool json_out) {
    pddl::Domain domain = pddl::parse_domain(slurp(domain_file));
    std::string template_text = slurp(tmpl_file);

    // Substitute each hypothesis into the template goal.
    std::vector<std::string> hyp_lines;
    {
        std::istringstream in(slurp(hyps_file));
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (!line.empty() && line[0] != ';' && line[0] != '#')
                hyp_lines.push_back(line);
        }
    }
    if (hyp_lines.empty()) throw ValidationError("no hypotheses");

    nlohmann::json all = nlohmann::json::array();
    for (const std::string &line : hyp_lines) {
        std::string goal_text = line;
        std::replace(goal_text.begin(), goal_text.end(), ',', ' ');
        std::string problem_text = template_text;
        std::size_t pos = problem_text.find("<HYPOTHESIS>");
        if (pos == std::string::npos)
            throw IoError("template lacks <HYPOTHESIS> token");
        problem_text.replace(pos, std::string("<HYPOTHESIS>").size(), goal_text);

        pddl::Problem problem = pddl::parse_problem(problem_text, domain);
        GroundTask task = ground(domain, problem);
        LandmarkGraph graph =
            extract_landmarks(task, task.initial_state(), task.goal);
        if (json_out) {
            all.push_back(graph_to_json(graph, task));
        } else {
            std::cout << "; goal: " << goal_text << "\n"
                      << to_listing(graph, task) << "\n";
        }
    }
    if (json_out) std::cout << all.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"landmark-based goal recognition toolkit"};
    app.require_subcommand(1);

    std::string domain, tmpl, hyps, obs, real, method = "gc";
    double theta = 0.0;
    bool facts_obs = false, json_out = false;
    double timeout_s = lmrec::default_timeout_seconds();
    auto *rec = app.add_subcommand("recognize", "run one recognition problem");
    rec->add_option("-d,--domain", domain)->required();
    rec->add_option("-t,--template", tmpl)->required();
    rec->add_option("-y,--hyps", hyps)->required();
    rec->add_option("-o,--obs", obs)->required();
    rec->add_option("-r,--real", real);
    rec->add_option("-m,--method", method)
        ->check(CLI::IsMember({"gc", "uniq", "filter"}));
    rec->add_option("--theta", theta);
    rec->add_flag("--facts-obs", facts_obs);
    rec->add_flag("--json", json_out);
    rec->add_option("--timeout", timeout_s);

    std::string root, out_file, format = "csv";
    std::vector<std::string> methods{"gc"};
    std::vector<double> thetas{0.0};
    int workers = 1;
    auto *ev = app.add_subcommand("evaluate", "run every bundle under a root");
    ev->add_option("-R,--root", root)->required();
    ev->add_option("-m,--methods", methods)->delimiter(',');
    ev->add_option("--theta-list", thetas)->delimiter(',');
    ev->add_option("--out", out_file);
    ev->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    ev->add_option("--workers", workers);
    ev->add_flag("--facts-obs", facts_obs);
    ev->add_option("--timeout", timeout_s);

    std::string gd_domain, gd_template, gd_hyps, gd_out;
    int real_index = 0;
    double observability = 1.0;
    int noise = 0;
    std::uint64_t seed = 0;
    auto *gd = app.add_subcommand("gen-dataset", "generate an observation bundle");
    gd->add_option("-d,--domain", gd_domain)->required();
    gd->add_option("-t,--template", gd_template)->required();
    gd->add_option("-y,--hyps", gd_hyps)->required();
    gd->add_option("-p,--real-index", real_index);
    gd->add_option("--observability", observability);
    gd->add_option("--noise", noise);
    gd->add_option("--seed", seed);
    gd->add_option("-O,--out", gd_out)->required();

    std::string lm_domain, lm_template, lm_hyps;
    bool lm_json = false;
    auto *lm = app.add_subcommand("landmarks", "dump landmark graphs per goal");
    lm->add_option("-d,--domain", lm_domain)->required();
    lm->add_option("-t,--template", lm_template)->required();
    lm->add_option("-y,--hyps", lm_hyps)->required();
    lm->add_flag("--json", lm_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rec->parsed())
            return cmd_recognize(domain, tmpl, hyps, obs, real, method, theta,
                                 facts_obs, json_out, timeout_s);
        if (ev->parsed()) {
            lmrec::RunOptions options;
            options.timeout_seconds = timeout_s;
            options.facts_mode = facts_obs;
            lmrec::MetricsReport report =
                lmrec::evaluate(root, methods, thetas, options, workers);
            if (!out_file.empty())
                lmrec::emit_report(report, format, out_file);
            else if (format == "json")
                std::cout << lmrec::report_to_json(report).dump(2) << "\n";
            else
                std::cout << lmrec::report_to_csv(report);
            for (auto &a : report.aggregates)
                std::fprintf(stderr,
                             "%s obs=%.2f %s theta=%.2f: accuracy %.3f spread "
                             "%.2f time %.3fs fpr %.3f (%d problems)\n",
                             a.domain.c_str(), a.observability,
                             a.method.c_str(), a.theta, a.accuracy,
                             a.mean_spread, a.mean_time, a.fpr, a.problems);
            if (report.failed_problems)
                std::fprintf(stderr, "%d problems failed\n",
                             report.failed_problems);
            return 0;
        }
        if (gd->parsed()) {
            lmrec::GenDatasetRequest req;
            req.domain_file = gd_domain;
            req.template_file = gd_template;
            req.hypotheses_file = gd_hyps;
            req.real_hypothesis = real_index;
            req.spec.observability = observability;
            req.spec.noise_count = noise;
            req.spec.seed = seed;
            req.out_dir = gd_out;
            lmrec::gen_dataset(req);
            return 0;
        }
        if (lm->parsed())
            return cmd_landmarks(lm_domain, lm_template, lm_hyps, lm_json);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
