#include "lmrec/harness.hpp"

#include "lmrec/errors.hpp"
#include "lmrec/sexpr.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace lmrec {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

std::vector<std::string> data_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == ';' || line[start] == '#') continue;
        lines.push_back(line.substr(start));
    }
    return lines;
}

// One hypothesis line: fluents separated by commas, e.g. "(on a b),(clear a)".
std::vector<pddl::Atom> parse_hypothesis_line(const std::string &line) {
    std::string spaced = line;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::vector<pddl::Atom> atoms;
    for (const Sexpr &e : read_sexprs(spaced)) {
        if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
            throw ValidationError("bad hypothesis fluent in line: " + line);
        pddl::Atom a;
        a.predicate = e.items[0].symbol;
        for (std::size_t i = 1; i < e.items.size(); ++i)
            a.args.push_back(e.items[i].symbol);
        atoms.push_back(std::move(a));
    }
    if (atoms.empty()) throw ValidationError("empty hypothesis line");
    return atoms;
}

constexpr const char *kHypothesisToken = "<HYPOTHESIS>";

std::size_t find_token_ci(const std::string &text, const std::string &token) {
    auto lower = [](char c) {
        return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    };
    if (text.size() < token.size()) return std::string::npos;
    for (std::size_t i = 0; i + token.size() <= text.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < token.size(); ++j)
            if (lower(text[i + j]) != lower(token[j])) {
                match = false;
                break;
            }
        if (match) return i;
    }
    return std::string::npos;
}

std::string substitute_hypothesis(const std::string &template_text,
                                  const std::string &goal_atoms) {
    std::size_t pos = find_token_ci(template_text, kHypothesisToken);
    if (pos == std::string::npos)
        throw IoError("hypothesis-substitution token <HYPOTHESIS> absent from "
                      "template");
    std::string out = template_text;
    out.replace(pos, std::string(kHypothesisToken).size(), goal_atoms);
    return out;
}

std::string atoms_to_text(const std::vector<pddl::Atom> &atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) s += " ";
        s += pddl::to_string(atoms[i]);
    }
    return s;
}

} // namespace

BundlePaths BundlePaths::resolved(const fs::path &dir) const {
    BundlePaths p;
    p.domain = dir / domain;
    p.template_problem = dir / template_problem;
    p.hypotheses = dir / hypotheses;
    p.observations = dir / observations;
    p.real_hypothesis = dir / real_hypothesis;
    return p;
}

LoadedBundle load_bundle(const BundlePaths &paths, bool facts_mode) {
    pddl::Domain domain = pddl::parse_domain(read_file(paths.domain));
    std::string template_text = read_file(paths.template_problem);

    std::vector<std::vector<pddl::Atom>> hyps;
    for (const std::string &line : data_lines(read_file(paths.hypotheses)))
        hyps.push_back(parse_hypothesis_line(line));
    if (hyps.empty()) throw ValidationError("no hypotheses in " +
                                            paths.hypotheses.string());

    // Parse the template once with the first hypothesis substituted; the
    // grounding depends only on the domain and objects, so the remaining
    // hypotheses are grounded as extra goal fact sets.
    pddl::Problem problem = pddl::parse_problem(
        substitute_hypothesis(template_text, atoms_to_text(hyps[0])), domain);
    GroundTask task = ground(domain, problem);

    std::vector<std::vector<FactId>> goals;
    for (auto &h : hyps) goals.push_back(task.intern_goal_facts(h));

    std::vector<std::string> obs_lines =
        data_lines(read_file(paths.observations));

    LoadedBundle bundle;
    bundle.domain_name = domain.name;
    bundle.problem =
        make_problem(std::move(task), std::move(goals), obs_lines, facts_mode);

    if (fs::exists(paths.real_hypothesis)) {
        auto lines = data_lines(read_file(paths.real_hypothesis));
        if (lines.empty())
            throw ValidationError("empty real hypothesis file");
        std::vector<FactId> real = bundle.problem.task.intern_goal_facts(
            parse_hypothesis_line(lines[0]));
        for (std::size_t i = 0; i < bundle.problem.candidate_goals.size(); ++i)
            if (bundle.problem.candidate_goals[i] == real) bundle.real_goal = i;
        if (!bundle.real_goal)
            throw ValidationError("real hypothesis is not among the candidate "
                                  "goals");
    }

    fs::path meta = paths.domain.parent_path() / "meta.json";
    if (fs::exists(meta)) {
        auto j = nlohmann::json::parse(read_file(meta));
        bundle.observability = j.value("observability", -1.0);
        bundle.noise = j.value("noise", -1);
        if (j.contains("domain")) bundle.domain_name = j["domain"];
    }
    return bundle;
}

double default_timeout_seconds() {
    if (const char *env = std::getenv("LMREC_TIMEOUT_S")) {
        char *end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0) return v;
    }
    return 1200.0;
}

ProblemRow run_problem(const LoadedBundle &bundle, const std::string &method,
                       double theta, const RunOptions &options) {
    ProblemRow row;
    row.domain = bundle.domain_name;
    row.observability = bundle.observability;
    row.num_goals = static_cast<int>(bundle.problem.candidate_goals.size());
    row.num_obs = static_cast<int>(bundle.problem.observations.size());
    row.method = method;
    row.theta = theta;

    RecognitionOptions ropts = options.recognition;
    ropts.deadline = std::chrono::steady_clock::now() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(options.timeout_seconds));
    try {
        RecognitionResult result;
        if (method == "gc")
            result = recognize_gc(bundle.problem, theta, ropts);
        else if (method == "uniq")
            result = recognize_uniq(bundle.problem, theta, ropts);
        else if (method == "filter")
            result = filter_candidate_goals(bundle.problem, theta, ropts);
        else
            throw ValidationError("unknown method: " + method);
        row.time_s = result.extraction_seconds + result.recognition_seconds;
        row.spread = static_cast<int>(result.returned.size());
        if (bundle.real_goal)
            row.correct = std::find(result.returned.begin(),
                                    result.returned.end(),
                                    *bundle.real_goal) != result.returned.end();
        int others = row.num_goals - 1;
        row.fpr = others > 0 ? static_cast<double>(row.spread -
                                                   (row.correct ? 1 : 0)) /
                                   others
                             : 0.0;
    } catch (const Error &e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

std::vector<fs::path> find_bundles(const fs::path &root) {
    std::vector<fs::path> out;
    BundlePaths names;
    auto is_bundle = [&](const fs::path &dir) {
        return fs::exists(dir / names.domain) &&
               fs::exists(dir / names.template_problem) &&
               fs::exists(dir / names.hypotheses) &&
               fs::exists(dir / names.observations);
    };
    if (fs::is_directory(root) && is_bundle(root)) out.push_back(root);
    if (fs::is_directory(root))
        for (auto &entry : fs::recursive_directory_iterator(root))
            if (entry.is_directory() && is_bundle(entry.path()))
                out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

MetricsReport evaluate(const fs::path &root,
                       const std::vector<std::string> &methods,
                       const std::vector<double> &thetas,
                       const RunOptions &options, int workers) {
    std::vector<fs::path> bundles = find_bundles(root);
    if (bundles.empty())
        throw IoError("no dataset bundles under " + root.string());

    struct Job {
        fs::path dir;
        std::string method;
        double theta;
    };
    std::vector<Job> jobs;
    for (auto &dir : bundles)
        for (auto &m : methods)
            for (double t : thetas) jobs.push_back({dir, m, t});

    MetricsReport report;
    report.rows.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job &job = jobs[i];
            ProblemRow row;
            try {
                LoadedBundle bundle = load_bundle(
                    BundlePaths().resolved(job.dir), options.facts_mode);
                row = run_problem(bundle, job.method, job.theta, options);
            } catch (const std::exception &e) {
                row.method = job.method;
                row.theta = job.theta;
                row.failed = true;
                row.error = e.what();
            }
            row.bundle = job.dir.string();
            report.rows[i] = std::move(row);
        }
    };
    int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto &t : pool) t.join();
    }
    report.compute_aggregates();
    return report;
}

void MetricsReport::compute_aggregates() {
    aggregates.clear();
    failed_problems = 0;
    std::map<std::tuple<std::string, double, std::string, double>,
             std::vector<const ProblemRow *>>
        groups;
    for (auto &row : rows) {
        if (row.failed) {
            ++failed_problems;
            continue;
        }
        groups[{row.domain, row.observability, row.method, row.theta}]
            .push_back(&row);
    }
    for (auto &[key, group] : groups) {
        Aggregate agg;
        agg.domain = std::get<0>(key);
        agg.observability = std::get<1>(key);
        agg.method = std::get<2>(key);
        agg.theta = std::get<3>(key);
        agg.problems = static_cast<int>(group.size());
        for (const ProblemRow *row : group) {
            agg.accuracy += row->correct ? 1.0 : 0.0;
            agg.mean_spread += row->spread;
            agg.mean_time += row->time_s;
            agg.fpr += row->fpr;
        }
        agg.accuracy /= agg.problems;
        agg.mean_spread /= agg.problems;
        agg.mean_time /= agg.problems;
        agg.fpr /= agg.problems;
        agg.tpr = agg.accuracy;
        aggregates.push_back(std::move(agg));
    }
}

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string report_to_csv(const MetricsReport &report) {
    std::string out = "domain,observability,num_goals,num_obs,method,theta,"
                      "time_s,correct,spread,fpr,bundle,failed,error\n";
    for (const ProblemRow &r : report.rows) {
        out += r.domain + "," + fixed3(r.observability) + "," +
               std::to_string(r.num_goals) + "," + std::to_string(r.num_obs) +
               "," + r.method + "," + fixed3(r.theta) + "," + fixed3(r.time_s) +
               "," + (r.correct ? "true" : "false") + "," +
               std::to_string(r.spread) + "," + fixed3(r.fpr) + "," + r.bundle +
               "," + (r.failed ? "true" : "false") + "," + r.error + "\n";
    }
    return out;
}

nlohmann::json report_to_json(const MetricsReport &report) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const ProblemRow &r : report.rows) {
        nlohmann::json row;
        row["bundle"] = r.bundle;
        row["domain"] = r.domain;
        row["observability"] = r.observability;
        row["num_goals"] = r.num_goals;
        row["num_obs"] = r.num_obs;
        row["method"] = r.method;
        row["theta"] = r.theta;
        row["time_s"] = r.time_s;
        row["correct"] = r.correct;
        row["spread"] = r.spread;
        row["fpr"] = r.fpr;
        row["failed"] = r.failed;
        if (r.failed) row["error"] = r.error;
        j["rows"].push_back(std::move(row));
    }
    j["aggregates"] = nlohmann::json::array();
    for (const Aggregate &a : report.aggregates) {
        nlohmann::json agg;
        agg["domain"] = a.domain;
        agg["observability"] = a.observability;
        agg["method"] = a.method;
        agg["theta"] = a.theta;
        agg["problems"] = a.problems;
        agg["accuracy"] = a.accuracy;
        agg["mean_spread"] = a.mean_spread;
        agg["mean_time"] = a.mean_time;
        agg["tpr"] = a.tpr;
        agg["fpr"] = a.fpr;
        j["aggregates"].push_back(std::move(agg));
    }
    j["failed_problems"] = report.failed_problems;
    return j;
}

void emit_report(const MetricsReport &report, const std::string &format,
                 const fs::path &file) {
    if (format == "csv")
        write_file(file, report_to_csv(report));
    else if (format == "json")
        write_file(file, report_to_json(report).dump(2) + "\n");
    else
        throw ValidationError("unknown report format: " + format);
}

void gen_dataset(const GenDatasetRequest &request) {
    std::string domain_text = read_file(request.domain_file);
    std::string template_text = read_file(request.template_file);
    std::string hyps_text = read_file(request.hypotheses_file);

    pddl::Domain domain = pddl::parse_domain(domain_text);
    std::vector<std::string> hyp_lines = data_lines(hyps_text);
    if (hyp_lines.empty()) throw ValidationError("no hypotheses to generate from");
    if (request.real_hypothesis < 0 ||
        request.real_hypothesis >= static_cast<int>(hyp_lines.size()))
        throw ValidationError("real hypothesis index out of range");
    const std::string &real_line = hyp_lines[request.real_hypothesis];

    pddl::Problem problem = pddl::parse_problem(
        substitute_hypothesis(template_text,
                              atoms_to_text(parse_hypothesis_line(real_line))),
        domain);
    GroundTask task = ground(domain, problem);
    State initial = task.initial_state();

    std::vector<ActionId> plan =
        find_plan(task, initial, task.goal, request.limits);
    if (!satisfies(replay(task, initial, plan), task.goal))
        throw Error("internal: generated plan fails replay validation");

    std::vector<ActionId> obs = plan;
    if (!plan.empty()) obs = project_missing(plan, request.spec);
    if (request.spec.noise_count > 0)
        obs = inject_noise(obs, request.spec, task, plan);

    fs::create_directories(request.out_dir);
    write_file(request.out_dir / "domain.pddl", domain_text);
    write_file(request.out_dir / "template.pddl", template_text);
    write_file(request.out_dir / "hyps.dat", hyps_text);
    std::string obs_text;
    for (ActionId a : obs) obs_text += task.actions[a].signature + "\n";
    write_file(request.out_dir / "obs.dat", obs_text);
    write_file(request.out_dir / "real_hyp.dat", real_line + "\n");

    nlohmann::json meta;
    meta["domain"] = domain.name;
    meta["observability"] = request.spec.observability;
    meta["noise"] = request.spec.noise_count;
    meta["seed"] = request.spec.seed;
    meta["plan_length"] = plan.size();
    write_file(request.out_dir / "meta.json", meta.dump(2) + "\n");
}

} // namespace lmrec
