#include "lmrec/pddl.hpp"

#include "lmrec/errors.hpp"
#include "lmrec/sexpr.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lmrec::pddl {

namespace {

bool is_variable(const std::string &s) { return !s.empty() && s[0] == '?'; }

[[noreturn]] void fail(const Sexpr &at, const std::string &msg) {
    throw ParseError(msg, at.line, at.column);
}

const std::string &expect_symbol(const Sexpr &e, const std::string &what) {
    if (!e.is_symbol()) fail(e, "expected " + what);
    return e.symbol;
}

// Parses a PDDL typed list "a b - t c d - u e" into typed names. Untyped
// trailing entries default to "object".
std::vector<TypedName> parse_typed_list(const std::vector<Sexpr> &items,
                                        std::size_t begin, const Sexpr &ctx) {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
        const std::string &tok = expect_symbol(items[i], "name in typed list");
        if (tok == "-") {
            if (i + 1 >= items.size())
                fail(items[i], "missing type after '-'");
            if (items[i + 1].is_list())
                throw UnsupportedFeatureError("either types", items[i + 1].line,
                                              items[i + 1].column);
            const std::string &type = expect_symbol(items[i + 1], "type name");
            if (pending.empty()) fail(items[i], "'-' without names before it");
            for (auto &n : pending) out.push_back({n, type});
            pending.clear();
            ++i;
        } else {
            pending.push_back(tok);
        }
    }
    for (auto &n : pending) out.push_back({n, "object"});
    (void)ctx;
    return out;
}

Atom parse_atom(const Sexpr &e) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
        fail(e, "expected atom");
    Atom a;
    a.predicate = e.items[0].symbol;
    for (std::size_t i = 1; i < e.items.size(); ++i)
        a.args.push_back(expect_symbol(e.items[i], "atom argument"));
    return a;
}

// Conjunction of positive literals only; names the offending construct
// otherwise.
void parse_precondition(const Sexpr &e, OperatorDef &op) {
    if (!e.is_list() || e.items.empty())
        fail(e, "expected precondition formula");
    const Sexpr &head = e.items[0];
    if (head.is_symbol("and")) {
        for (std::size_t i = 1; i < e.items.size(); ++i)
            parse_precondition(e.items[i], op);
        return;
    }
    if (head.is_symbol("not"))
        throw UnsupportedFeatureError("negative preconditions", e.line, e.column);
    if (head.is_symbol("="))
        throw UnsupportedFeatureError("equality", e.line, e.column);
    if (head.is_symbol("or") || head.is_symbol("imply") ||
        head.is_symbol("forall") || head.is_symbol("exists"))
        throw UnsupportedFeatureError(head.symbol + " preconditions", e.line,
                                      e.column);
    op.pre.push_back(parse_atom(e));
}

void parse_effect(const Sexpr &e, OperatorDef &op) {
    if (!e.is_list() || e.items.empty()) fail(e, "expected effect formula");
    const Sexpr &head = e.items[0];
    if (head.is_symbol("and")) {
        for (std::size_t i = 1; i < e.items.size(); ++i)
            parse_effect(e.items[i], op);
        return;
    }
    if (head.is_symbol("when"))
        throw UnsupportedFeatureError("conditional effects", e.line, e.column);
    if (head.is_symbol("forall"))
        throw UnsupportedFeatureError("quantified effects", e.line, e.column);
    if (head.is_symbol("increase") || head.is_symbol("decrease") ||
        head.is_symbol("assign"))
        throw UnsupportedFeatureError("numeric effects", e.line, e.column);
    if (head.is_symbol("not")) {
        if (e.items.size() != 2) fail(e, "malformed (not ...)");
        op.del.push_back(parse_atom(e.items[1]));
        return;
    }
    op.add.push_back(parse_atom(e));
}

void check_operator_vars(const OperatorDef &op) {
    std::unordered_set<std::string> params;
    for (auto &p : op.params) {
        if (!is_variable(p.name))
            throw ValidationError("operator " + op.name +
                                  ": parameter must be a variable: " + p.name);
        if (!params.insert(p.name).second)
            throw ValidationError("operator " + op.name +
                                  ": duplicate parameter " + p.name);
    }
    auto check = [&](const std::vector<Atom> &atoms, const char *where) {
        for (auto &a : atoms)
            for (auto &arg : a.args)
                if (is_variable(arg) && !params.count(arg))
                    throw ValidationError("operator " + op.name + ": variable " +
                                          arg + " in " + where +
                                          " is not a parameter");
    };
    check(op.pre, "precondition");
    check(op.add, "effect");
    check(op.del, "effect");
}

void validate_atom_against_domain(
    const Atom &a, const Domain &domain,
    const std::unordered_map<std::string, std::string> &object_types,
    const char *where) {
    const PredicateDef *pred = domain.find_predicate(a.predicate);
    if (!pred)
        throw ValidationError(std::string(where) + ": undeclared predicate " +
                              a.predicate);
    if (pred->params.size() != a.args.size())
        throw ValidationError(std::string(where) + ": predicate " + a.predicate +
                              " expects " + std::to_string(pred->params.size()) +
                              " arguments, got " + std::to_string(a.args.size()));
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        const std::string &arg = a.args[i];
        if (is_variable(arg))
            throw ValidationError(std::string(where) +
                                  ": variable in ground atom: " + arg);
        auto it = object_types.find(arg);
        if (it == object_types.end())
            throw ValidationError(std::string(where) + ": undeclared object " +
                                  arg + " in " + to_string(a));
        if (domain.typing && !domain.type_matches(it->second, pred->params[i].type))
            throw ValidationError(std::string(where) + ": object " + arg +
                                  " of type " + it->second +
                                  " does not match parameter type " +
                                  pred->params[i].type + " in " + to_string(a));
    }
}

} // namespace

const PredicateDef *Domain::find_predicate(const std::string &pname) const {
    for (auto &p : predicates)
        if (p.name == pname) return &p;
    return nullptr;
}

const OperatorDef *Domain::find_operator(const std::string &oname) const {
    for (auto &o : operators)
        if (o.name == oname) return &o;
    return nullptr;
}

bool Domain::type_matches(const std::string &type,
                          const std::string &ancestor) const {
    if (ancestor == "object" || type == ancestor) return true;
    std::string cur = type;
    // Walk parents; the type list is small and acyclic by construction.
    for (int guard = 0; guard < 64; ++guard) {
        const TypedName *entry = nullptr;
        for (auto &t : types)
            if (t.name == cur) {
                entry = &t;
                break;
            }
        if (!entry) return false;
        if (entry->type == ancestor) return true;
        if (entry->type == cur || entry->type == "object") return false;
        cur = entry->type;
    }
    return false;
}

Domain parse_domain(const std::string &text) {
    Sexpr root = read_sexpr(text);
    if (!root.is_list() || root.items.size() < 2 ||
        !root.items[0].is_symbol("define"))
        fail(root, "expected (define (domain ...) ...)");
    const Sexpr &head = root.items[1];
    if (!head.is_list() || head.items.size() != 2 ||
        !head.items[0].is_symbol("domain"))
        fail(head, "expected (domain NAME)");

    Domain d;
    d.name = expect_symbol(head.items[1], "domain name");

    static const std::set<std::string> supported = {":strips", ":typing"};

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr &sec = root.items[i];
        if (!sec.is_list() || sec.items.empty() || !sec.items[0].is_symbol())
            fail(sec, "expected domain section");
        const std::string &kind = sec.items[0].symbol;
        if (kind == ":requirements") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string &req =
                    expect_symbol(sec.items[j], "requirement");
                if (!supported.count(req))
                    throw UnsupportedFeatureError("requirement " + req,
                                                  sec.items[j].line,
                                                  sec.items[j].column);
                d.requirements.push_back(req);
                if (req == ":typing") d.typing = true;
            }
        } else if (kind == ":types") {
            if (!d.typing)
                throw UnsupportedFeatureError(
                    ":types without :typing requirement", sec.line, sec.column);
            d.types = parse_typed_list(sec.items, 1, sec);
        } else if (kind == ":constants") {
            d.constants = parse_typed_list(sec.items, 1, sec);
        } else if (kind == ":predicates") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const Sexpr &pe = sec.items[j];
                if (!pe.is_list() || pe.items.empty())
                    fail(pe, "expected predicate declaration");
                PredicateDef p;
                p.name = expect_symbol(pe.items[0], "predicate name");
                p.params = parse_typed_list(pe.items, 1, pe);
                if (d.find_predicate(p.name))
                    throw ValidationError("duplicate predicate " + p.name);
                d.predicates.push_back(std::move(p));
            }
        } else if (kind == ":action") {
            if (sec.items.size() < 2) fail(sec, "expected action name");
            OperatorDef op;
            op.name = expect_symbol(sec.items[1], "action name");
            if (d.find_operator(op.name))
                throw ValidationError("duplicate operator name " + op.name);
            for (std::size_t j = 2; j + 1 < sec.items.size(); j += 2) {
                const std::string &key =
                    expect_symbol(sec.items[j], "action keyword");
                const Sexpr &val = sec.items[j + 1];
                if (key == ":parameters") {
                    if (!val.is_list()) fail(val, "expected parameter list");
                    op.params = parse_typed_list(val.items, 0, val);
                } else if (key == ":precondition") {
                    if (val.is_list() && val.items.empty())
                        continue; // () means empty precondition
                    parse_precondition(val, op);
                } else if (key == ":effect") {
                    parse_effect(val, op);
                } else {
                    throw UnsupportedFeatureError("action keyword " + key,
                                                  sec.items[j].line,
                                                  sec.items[j].column);
                }
            }
            check_operator_vars(op);
            d.operators.push_back(std::move(op));
        } else if (kind == ":functions") {
            throw UnsupportedFeatureError("numeric fluents (:functions)",
                                          sec.line, sec.column);
        } else {
            throw UnsupportedFeatureError("domain section " + kind, sec.line,
                                          sec.column);
        }
    }

    // Typed operators and predicates must reference declared types.
    if (d.typing) {
        auto known = [&](const std::string &t) {
            if (t == "object") return true;
            return std::any_of(d.types.begin(), d.types.end(),
                               [&](const TypedName &x) { return x.name == t; });
        };
        for (auto &p : d.predicates)
            for (auto &prm : p.params)
                if (!known(prm.type))
                    throw ValidationError("predicate " + p.name +
                                          ": unknown type " + prm.type);
        for (auto &op : d.operators)
            for (auto &prm : op.params)
                if (!known(prm.type))
                    throw ValidationError("operator " + op.name +
                                          ": unknown type " + prm.type);
    }
    return d;
}

Problem parse_problem(const std::string &text, const Domain &domain) {
    Sexpr root = read_sexpr(text);
    if (!root.is_list() || root.items.size() < 2 ||
        !root.items[0].is_symbol("define"))
        fail(root, "expected (define (problem ...) ...)");
    const Sexpr &head = root.items[1];
    if (!head.is_list() || head.items.size() != 2 ||
        !head.items[0].is_symbol("problem"))
        fail(head, "expected (problem NAME)");

    Problem p;
    p.name = expect_symbol(head.items[1], "problem name");

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr &sec = root.items[i];
        if (!sec.is_list() || sec.items.empty() || !sec.items[0].is_symbol())
            fail(sec, "expected problem section");
        const std::string &kind = sec.items[0].symbol;
        if (kind == ":domain") {
            if (sec.items.size() != 2) fail(sec, "expected (:domain NAME)");
            p.domain_name = expect_symbol(sec.items[1], "domain name");
        } else if (kind == ":objects") {
            p.objects = parse_typed_list(sec.items, 1, sec);
        } else if (kind == ":init") {
            for (std::size_t j = 1; j < sec.items.size(); ++j)
                p.init.push_back(parse_atom(sec.items[j]));
        } else if (kind == ":goal") {
            if (sec.items.size() != 2) fail(sec, "expected (:goal FORMULA)");
            const Sexpr &g = sec.items[1];
            if (!g.is_list() || g.items.empty()) fail(g, "expected goal formula");
            if (g.items[0].is_symbol("and")) {
                for (std::size_t j = 1; j < g.items.size(); ++j) {
                    if (g.items[j].is_list() && !g.items[j].items.empty() &&
                        g.items[j].items[0].is_symbol("not"))
                        throw UnsupportedFeatureError("negative goals",
                                                      g.items[j].line,
                                                      g.items[j].column);
                    p.goal.push_back(parse_atom(g.items[j]));
                }
            } else if (g.items[0].is_symbol("not")) {
                throw UnsupportedFeatureError("negative goals", g.line, g.column);
            } else {
                p.goal.push_back(parse_atom(g));
            }
        } else if (kind == ":metric") {
            throw UnsupportedFeatureError("metrics", sec.line, sec.column);
        } else {
            throw UnsupportedFeatureError("problem section " + kind, sec.line,
                                          sec.column);
        }
    }

    if (!p.domain_name.empty() && p.domain_name != domain.name)
        throw ValidationError("problem references domain '" + p.domain_name +
                              "' but '" + domain.name + "' was parsed");

    std::unordered_map<std::string, std::string> object_types;
    for (auto &c : domain.constants) object_types[c.name] = c.type;
    for (auto &o : p.objects) {
        if (!object_types.emplace(o.name, o.type).second)
            throw ValidationError("duplicate object " + o.name);
        if (domain.typing && !o.type.empty() && o.type != "object") {
            bool known = std::any_of(
                domain.types.begin(), domain.types.end(),
                [&](const TypedName &t) { return t.name == o.type; });
            if (!known)
                throw ValidationError("object " + o.name + ": unknown type " +
                                      o.type);
        }
    }

    for (auto &a : p.init)
        validate_atom_against_domain(a, domain, object_types, "init");
    for (auto &a : p.goal)
        validate_atom_against_domain(a, domain, object_types, "goal");
    return p;
}

std::string to_string(const Atom &atom) {
    std::string s = "(" + atom.predicate;
    for (auto &a : atom.args) s += " " + a;
    s += ")";
    return s;
}

namespace {

void print_typed_list(std::ostringstream &os, const std::vector<TypedName> &xs) {
    // Each name gets its own "- type" so mixed typed/untyped lists reparse
    // unambiguously.
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << " ";
        os << xs[i].name << " - " << xs[i].type;
    }
}

} // namespace

std::string pretty_print(const Domain &d) {
    std::ostringstream os;
    os << "(define (domain " << d.name << ")\n";
    if (!d.requirements.empty()) {
        os << "  (:requirements";
        for (auto &r : d.requirements) os << " " << r;
        os << ")\n";
    }
    if (!d.types.empty()) {
        os << "  (:types ";
        print_typed_list(os, d.types);
        os << ")\n";
    }
    if (!d.constants.empty()) {
        os << "  (:constants ";
        print_typed_list(os, d.constants);
        os << ")\n";
    }
    if (!d.predicates.empty()) {
        os << "  (:predicates";
        for (auto &p : d.predicates) {
            os << " (" << p.name;
            for (auto &prm : p.params) os << " " << prm.name << " - " << prm.type;
            os << ")";
        }
        os << ")\n";
    }
    for (auto &op : d.operators) {
        os << "  (:action " << op.name << "\n    :parameters (";
        print_typed_list(os, op.params);
        os << ")\n    :precondition (and";
        for (auto &a : op.pre) os << " " << to_string(a);
        os << ")\n    :effect (and";
        for (auto &a : op.add) os << " " << to_string(a);
        for (auto &a : op.del) os << " (not " << to_string(a) << ")";
        os << "))\n";
    }
    os << ")\n";
    return os.str();
}

std::string pretty_print(const Problem &p) {
    std::ostringstream os;
    os << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name
       << ")\n";
    if (!p.objects.empty()) {
        os << "  (:objects ";
        print_typed_list(os, p.objects);
        os << ")\n";
    }
    os << "  (:init";
    for (auto &a : p.init) os << " " << to_string(a);
    os << ")\n  (:goal (and";
    for (auto &a : p.goal) os << " " << to_string(a);
    os << ")))\n";
    return os.str();
}

} // namespace lmrec::pddl
