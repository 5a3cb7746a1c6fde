#include "generators.hpp"

#include "lmrec/errors.hpp"
#include "lmrec/sexpr.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace lmrec::test {

namespace {

const char *kBlocksDomain = R"((define (domain blocks-world)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action putdown
    :parameters (?x)
    :precondition (and (holding ?x))
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

const char *kFerryDomain = R"((define (domain ferry)
  (:requirements :strips :typing)
  (:types car location - object)
  (:predicates (at ?c - car ?l - location) (at-ferry ?l - location)
               (on-ferry ?c - car) (empty-ferry))
  (:action sail
    :parameters (?from - location ?to - location)
    :precondition (and (at-ferry ?from))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?c - car ?l - location)
    :precondition (and (at ?c ?l) (at-ferry ?l) (empty-ferry))
    :effect (and (on-ferry ?c) (not (at ?c ?l)) (not (empty-ferry))))
  (:action debark
    :parameters (?c - car ?l - location)
    :precondition (and (on-ferry ?c) (at-ferry ?l))
    :effect (and (at ?c ?l) (empty-ferry) (not (on-ferry ?c)))))
)";

const char *kLogisticsDomain = R"((define (domain transport)
  (:requirements :strips :typing)
  (:types package location - object)
  (:predicates (at ?p - package ?l - location) (truck-at ?l - location)
               (in-truck ?p - package) (road ?x - location ?y - location))
  (:action drive
    :parameters (?from - location ?to - location)
    :precondition (and (truck-at ?from) (road ?from ?to))
    :effect (and (truck-at ?to) (not (truck-at ?from))))
  (:action load
    :parameters (?p - package ?l - location)
    :precondition (and (at ?p ?l) (truck-at ?l))
    :effect (and (in-truck ?p) (not (at ?p ?l))))
  (:action unload
    :parameters (?p - package ?l - location)
    :precondition (and (in-truck ?p) (truck-at ?l))
    :effect (and (at ?p ?l) (not (in-truck ?p)))))
)";

const char *kIntrusionDomain = R"((define (domain intrusion)
  (:requirements :strips)
  (:predicates (known ?s) (breached ?s) (rooted ?s)
               (stolen ?s) (vandalized ?s))
  (:action recon
    :parameters (?s)
    :precondition ()
    :effect (and (known ?s)))
  (:action break-into
    :parameters (?s)
    :precondition (and (known ?s))
    :effect (and (breached ?s)))
  (:action gain-root
    :parameters (?s)
    :precondition (and (breached ?s))
    :effect (and (rooted ?s)))
  (:action steal-data
    :parameters (?s)
    :precondition (and (rooted ?s))
    :effect (and (stolen ?s)))
  (:action vandalize
    :parameters (?s)
    :precondition (and (rooted ?s))
    :effect (and (vandalized ?s))))
)";

const char *kKitchenDomain = R"((define (domain kitchen)
  (:requirements :strips)
  (:predicates (have ?i) (made ?d) (uses1 ?d ?i) (uses2 ?d ?i))
  (:action take
    :parameters (?i)
    :precondition ()
    :effect (and (have ?i)))
  (:action cook
    :parameters (?d ?i1 ?i2)
    :precondition (and (uses1 ?d ?i1) (uses2 ?d ?i2) (have ?i1) (have ?i2))
    :effect (and (made ?d))))
)";

std::string obj(const char *prefix, int i) {
    return std::string(prefix) + std::to_string(i);
}

std::string join(const std::vector<std::string> &parts, const char *sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Complete tower description: bottom on the table, clear top.
std::string tower_goal(const std::vector<std::string> &bottom_to_top) {
    std::vector<std::string> facts;
    facts.push_back("(ontable " + bottom_to_top.front() + ")");
    for (std::size_t i = 1; i < bottom_to_top.size(); ++i)
        facts.push_back("(on " + bottom_to_top[i] + " " + bottom_to_top[i - 1] +
                        ")");
    facts.push_back("(clear " + bottom_to_top.back() + ")");
    return join(facts, ",");
}

} // namespace

GeneratedScenario gen_blocks(Rng &rng, int num_blocks, int num_goals) {
    GeneratedScenario s;
    s.name = "blocks";
    s.domain_text = kBlocksDomain;

    std::vector<std::string> blocks;
    for (int i = 0; i < num_blocks; ++i) blocks.push_back(obj("b", i));

    // Random initial stacking: shuffle, then split into stacks.
    std::vector<std::string> order = blocks;
    std::shuffle(order.begin(), order.end(), rng);
    std::ostringstream init;
    std::string below;
    for (std::size_t i = 0; i < order.size(); ++i) {
        bool new_stack = below.empty() ||
                         std::uniform_int_distribution<int>(0, 1)(rng) == 0;
        if (new_stack) {
            if (!below.empty()) init << " (clear " << below << ")";
            init << " (ontable " << order[i] << ")";
        } else {
            init << " (on " << order[i] << " " << below << ")";
        }
        below = order[i];
    }
    if (!below.empty()) init << " (clear " << below << ")";
    init << " (handempty)";

    std::ostringstream tpl;
    tpl << "(define (problem blocks-gen)\n  (:domain blocks-world)\n"
        << "  (:objects " << join(blocks) << ")\n"
        << "  (:init" << init.str() << ")\n"
        << "  (:goal (and <HYPOTHESIS>)))\n";
    s.template_text = tpl.str();

    int height = std::min<int>(4, num_blocks);
    std::set<std::string> seen;
    while (static_cast<int>(s.hypothesis_lines.size()) < num_goals) {
        std::vector<std::string> pick = blocks;
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(height);
        std::string line = tower_goal(pick);
        if (seen.insert(line).second) s.hypothesis_lines.push_back(line);
    }
    s.real_index = std::uniform_int_distribution<int>(0, num_goals - 1)(rng);
    return s;
}

GeneratedScenario gen_ferry(Rng &rng, int num_cars, int num_locations,
                            int num_goals) {
    GeneratedScenario s;
    s.name = "ferry";
    s.domain_text = kFerryDomain;

    std::vector<std::string> cars, locs;
    for (int i = 0; i < num_cars; ++i) cars.push_back(obj("c", i));
    for (int i = 0; i < num_locations; ++i) locs.push_back(obj("l", i));

    std::ostringstream tpl;
    tpl << "(define (problem ferry-gen)\n  (:domain ferry)\n  (:objects "
        << join(cars) << " - car " << join(locs) << " - location)\n  (:init"
        << " (at-ferry l0) (empty-ferry)";
    std::vector<int> start(num_cars);
    for (int i = 0; i < num_cars; ++i) {
        start[i] = std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
        tpl << " (at " << cars[i] << " " << locs[start[i]] << ")";
    }
    tpl << ")\n  (:goal (and <HYPOTHESIS>)))\n";
    s.template_text = tpl.str();

    std::set<std::string> seen;
    while (static_cast<int>(s.hypothesis_lines.size()) < num_goals) {
        std::vector<std::string> facts;
        bool moved = false;
        for (int i = 0; i < num_cars; ++i) {
            int dest =
                std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
            if (dest != start[i]) moved = true;
            facts.push_back("(at " + cars[i] + " " + locs[dest] + ")");
        }
        if (!moved) continue; // avoid the trivially satisfied assignment
        std::string line = join(facts, ",");
        if (seen.insert(line).second) s.hypothesis_lines.push_back(line);
    }
    s.real_index = std::uniform_int_distribution<int>(0, num_goals - 1)(rng);
    return s;
}

GeneratedScenario gen_logistics(Rng &rng, int num_locations, int num_packages,
                                int num_goals) {
    GeneratedScenario s;
    s.name = "transport";
    s.domain_text = kLogisticsDomain;

    std::vector<std::string> locs, pkgs;
    for (int i = 0; i < num_locations; ++i) locs.push_back(obj("l", i));
    for (int i = 0; i < num_packages; ++i) pkgs.push_back(obj("p", i));

    std::ostringstream tpl;
    tpl << "(define (problem transport-gen)\n  (:domain transport)\n"
        << "  (:objects " << join(pkgs) << " - package " << join(locs)
        << " - location)\n  (:init (truck-at l0)";
    // Random spanning tree keeps the map connected; a few extra edges.
    for (int i = 1; i < num_locations; ++i) {
        int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
        tpl << " (road " << locs[i] << " " << locs[parent] << ")"
            << " (road " << locs[parent] << " " << locs[i] << ")";
    }
    int extra = std::uniform_int_distribution<int>(0, num_locations / 2)(rng);
    for (int e = 0; e < extra; ++e) {
        int x = std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
        int y = std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
        if (x != y)
            tpl << " (road " << locs[x] << " " << locs[y] << ")"
                << " (road " << locs[y] << " " << locs[x] << ")";
    }
    std::vector<int> start(num_packages);
    for (int i = 0; i < num_packages; ++i) {
        start[i] = std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
        tpl << " (at " << pkgs[i] << " " << locs[start[i]] << ")";
    }
    tpl << ")\n  (:goal (and <HYPOTHESIS>)))\n";
    s.template_text = tpl.str();

    std::set<std::string> seen;
    while (static_cast<int>(s.hypothesis_lines.size()) < num_goals) {
        std::vector<std::string> facts;
        bool moved = false;
        for (int i = 0; i < num_packages; ++i) {
            int dest =
                std::uniform_int_distribution<int>(0, num_locations - 1)(rng);
            if (dest != start[i]) moved = true;
            facts.push_back("(at " + pkgs[i] + " " + locs[dest] + ")");
        }
        if (!moved) continue;
        std::string line = join(facts, ",");
        if (seen.insert(line).second) s.hypothesis_lines.push_back(line);
    }
    s.real_index = std::uniform_int_distribution<int>(0, num_goals - 1)(rng);
    return s;
}

GeneratedScenario gen_intrusion(Rng &rng, int num_servers, int goal_size,
                                int num_goals) {
    GeneratedScenario s;
    s.name = "intrusion";
    s.domain_text = kIntrusionDomain;

    std::vector<std::string> servers;
    for (int i = 0; i < num_servers; ++i) servers.push_back(obj("srv", i));

    std::ostringstream tpl;
    tpl << "(define (problem intrusion-gen)\n  (:domain intrusion)\n"
        << "  (:objects " << join(servers) << ")\n  (:init (known srv0))\n"
        << "  (:goal (and <HYPOTHESIS>)))\n";
    s.template_text = tpl.str();

    std::set<std::string> seen;
    while (static_cast<int>(s.hypothesis_lines.size()) < num_goals) {
        std::vector<std::string> pick = servers;
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(std::min<int>(goal_size, num_servers));
        std::sort(pick.begin(), pick.end());
        std::vector<std::string> facts;
        for (auto &srv : pick) {
            bool steal = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
            facts.push_back(std::string(steal ? "(stolen " : "(vandalized ") +
                            srv + ")");
        }
        std::string line = join(facts, ",");
        if (seen.insert(line).second) s.hypothesis_lines.push_back(line);
    }
    s.real_index = std::uniform_int_distribution<int>(0, num_goals - 1)(rng);
    return s;
}

GeneratedScenario gen_kitchen(Rng &rng, int num_dishes, int num_goals) {
    GeneratedScenario s;
    s.name = "kitchen";
    s.domain_text = kKitchenDomain;
    num_goals = std::min(num_goals, num_dishes);

    std::vector<std::string> dishes, ingredients;
    for (int i = 0; i < num_dishes; ++i) dishes.push_back(obj("dish", i));
    int num_ingredients = num_dishes + 2;
    for (int i = 0; i < num_ingredients; ++i)
        ingredients.push_back(obj("ing", i));

    std::ostringstream tpl;
    tpl << "(define (problem kitchen-gen)\n  (:domain kitchen)\n  (:objects "
        << join(dishes) << " " << join(ingredients) << ")\n  (:init";
    for (int d = 0; d < num_dishes; ++d) {
        int i1 = std::uniform_int_distribution<int>(0, num_ingredients - 1)(rng);
        int i2 = std::uniform_int_distribution<int>(0, num_ingredients - 1)(rng);
        if (i2 == i1) i2 = (i1 + 1) % num_ingredients;
        tpl << " (uses1 " << dishes[d] << " " << ingredients[i1] << ")"
            << " (uses2 " << dishes[d] << " " << ingredients[i2] << ")";
    }
    tpl << ")\n  (:goal (and <HYPOTHESIS>)))\n";
    s.template_text = tpl.str();

    std::vector<int> pick(num_dishes);
    for (int i = 0; i < num_dishes; ++i) pick[i] = i;
    std::shuffle(pick.begin(), pick.end(), rng);
    for (int g = 0; g < num_goals; ++g)
        s.hypothesis_lines.push_back("(made " + dishes[pick[g]] + ")");
    s.real_index = std::uniform_int_distribution<int>(0, num_goals - 1)(rng);
    return s;
}

namespace {

std::string substitute(const std::string &template_text,
                       const std::string &hyp_line) {
    std::string goal = hyp_line;
    std::replace(goal.begin(), goal.end(), ',', ' ');
    std::string out = template_text;
    std::size_t pos = out.find("<HYPOTHESIS>");
    if (pos == std::string::npos)
        throw ValidationError("generated template lacks <HYPOTHESIS>");
    out.replace(pos, std::string("<HYPOTHESIS>").size(), goal);
    return out;
}

std::vector<pddl::Atom> hyp_atoms(const std::string &line) {
    std::string spaced = line;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::vector<pddl::Atom> atoms;
    for (const Sexpr &e : read_sexprs(spaced)) {
        pddl::Atom a;
        a.predicate = e.items[0].symbol;
        for (std::size_t i = 1; i < e.items.size(); ++i)
            a.args.push_back(e.items[i].symbol);
        atoms.push_back(std::move(a));
    }
    return atoms;
}

} // namespace

BuiltInstanceWithPlan build_instance_with_plan(const GeneratedScenario &scenario) {
    pddl::Domain domain = pddl::parse_domain(scenario.domain_text);
    pddl::Problem problem = pddl::parse_problem(
        substitute(scenario.template_text,
                   scenario.hypothesis_lines[scenario.real_index]),
        domain);
    BuiltInstanceWithPlan built;
    built.task = ground(domain, problem);
    for (auto &line : scenario.hypothesis_lines)
        built.goals.push_back(built.task.intern_goal_facts(hyp_atoms(line)));
    built.real_index = scenario.real_index;
    built.plan = find_plan(built.task, built.task.initial_state(),
                           built.goals[scenario.real_index]);
    return built;
}

BuiltInstance build_instance(const GeneratedScenario &scenario,
                             double observability, int noise,
                             std::uint64_t seed) {
    BuiltInstanceWithPlan base = build_instance_with_plan(scenario);

    ObservationSpec spec;
    spec.observability = observability;
    spec.noise_count = noise;
    spec.seed = seed;

    std::vector<ActionId> obs = base.plan;
    if (!base.plan.empty() && observability < 1.0)
        obs = project_missing(base.plan, spec);
    if (noise > 0) obs = inject_noise(obs, spec, base.task, base.plan);

    std::vector<std::string> lines;
    for (ActionId a : obs) lines.push_back(base.task.actions[a].signature);

    BuiltInstance out;
    out.real_index = base.real_index;
    out.plan_length = base.plan.size();
    out.problem = make_problem(std::move(base.task), std::move(base.goals),
                               lines, false);
    return out;
}

} // namespace lmrec::test
