// wldlog: command line front end for the disjunctive-datalog toolchain.
//
// Exit codes: 0 success, 1 semantic failure (parse/validation errors,
// inapplicable rewriting, step limit, no derivation, failed equivalence
// check), 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wldlog/analysis.hpp"
#include "wldlog/derive.hpp"
#include "wldlog/engine.hpp"
#include "wldlog/harness.hpp"
#include "wldlog/oracle.hpp"
#include "wldlog/parse.hpp"
#include "wldlog/print.hpp"
#include "wldlog/psi.hpp"
#include "wldlog/rlor.hpp"
#include "wldlog/unfold.hpp"
#include "wldlog/xi.hpp"

using json = nlohmann::ordered_json;
using namespace wldlog;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Programs are parsed leniently so that the output of `rewrite` (which uses
// primed auxiliary predicate names) can be fed back into other subcommands.
Program load_program(const std::string& path) {
    return parse_program(slurp(path), /*internal=*/true);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
    }
}

std::set<std::string> split_names(const std::string& csv) {
    std::set<std::string> out;
    std::string cur;
    std::istringstream ss(csv);
    while (std::getline(ss, cur, ','))
        if (!cur.empty()) out.insert(cur);
    return out;
}

std::vector<Atom> parse_goal(const std::string& text) {
    Program g = parse_program(text + ".", /*internal=*/true);
    if (g.rules.size() != 1 || !g.rules[0].body.empty())
        throw ValidationError("goal must be a disjunction of ground atoms");
    for (const auto& a : g.rules[0].head)
        if (!a.ground()) throw ValidationError("goal atoms must be ground");
    return g.rules[0].head;
}

json program_json(const Program& p) {
    json rules = json::array();
    for (const auto& r : p.rules)
        if (!r.top_rule) rules.push_back(print_rule(r));
    return rules;
}

json eval_json(const EvalResult& r) {
    json j;
    j["unsat"] = r.unsat;
    json facts = json::array();
    for (const auto& f : r.facts) facts.push_back(print_atom(f));
    j["facts"] = std::move(facts);
    return j;
}

std::string eval_text(const EvalResult& r) {
    if (r.unsat) return "unsat\n";
    std::string out;
    for (const auto& f : r.facts) out += print_atom(f) + ".\n";
    return out;
}

json trace_json(const RewriteTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"rule", s.rule_text}, {"atom", s.atom_text}, {"resolvents", s.resolvents}});
    return json{{"outcome", to_string(t.outcome)}, {"steps", std::move(steps)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disjunctive datalog rewriting toolchain"};
    app.require_subcommand(1);

    bool as_json = false;
    std::string out_path;
    app.add_flag("--json", as_json, "machine-readable JSON output");
    app.add_option("-o,--output", out_path, "write results to a file instead of stdout");

    // --- validate ---------------------------------------------------------
    std::string v_file;
    auto* cmd_validate = app.add_subcommand("validate", "parse and validate a program");
    cmd_validate->add_option("file", v_file, "program file")->required();

    // --- classify ---------------------------------------------------------
    std::string c_file;
    bool c_dot = false;
    auto* cmd_classify = app.add_subcommand("classify", "classify a program and its predicates");
    cmd_classify->add_option("file", c_file, "program file")->required();
    cmd_classify->add_flag("--dot", c_dot, "emit the dependency graph in DOT format");

    // --- rewrite ----------------------------------------------------------
    std::string r_file, r_mode = "auto", r_goals;
    std::size_t r_max_steps = 1000;
    auto* cmd_rewrite = app.add_subcommand("rewrite", "rewrite a program");
    cmd_rewrite->add_option("file", r_file, "program file")->required();
    cmd_rewrite->add_option("--mode", r_mode, "xi | xi-prime | psi | auto (default auto)")
        ->check(CLI::IsMember({"xi", "xi-prime", "psi", "auto"}));
    cmd_rewrite->add_option("--goal", r_goals, "comma-separated goal predicates to prune for");
    cmd_rewrite->add_option("--max-unfold-steps", r_max_steps, "unfolding step cap (default 1000)");

    // --- prune ------------------------------------------------------------
    std::string p_file, p_goals;
    auto* cmd_prune = app.add_subcommand("prune", "rewrite a WL program and keep only goal-relevant rules");
    cmd_prune->add_option("file", p_file, "program file")->required();
    cmd_prune->add_option("--goal", p_goals, "comma-separated goal predicates")->required();

    // --- eval -------------------------------------------------------------
    std::string e_prog, e_data;
    bool e_oracle = false, e_engine = false;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a program over a dataset");
    cmd_eval->add_option("program", e_prog, "program file")->required();
    cmd_eval->add_option("data", e_data, "dataset file")->required();
    cmd_eval->add_flag("--engine", e_engine, "semi-naive datalog engine (datalog programs only)");
    cmd_eval->add_flag("--oracle", e_oracle, "cautious ground oracle (any program)");

    // --- entail -----------------------------------------------------------
    std::string n_prog, n_data, n_goal;
    bool n_oracle = false;
    auto* cmd_entail = app.add_subcommand("entail", "decide entailment of a ground disjunction");
    cmd_entail->add_option("program", n_prog, "program file")->required();
    cmd_entail->add_option("data", n_data, "dataset file")->required();
    cmd_entail->add_option("--goal", n_goal, "ground atom or disjunction, e.g. 'b(a) | g(a)'")
        ->required();
    cmd_entail->add_flag("--oracle", n_oracle, "force the ground oracle");

    // --- derive -----------------------------------------------------------
    std::string d_prog, d_data, d_goal;
    bool d_dot = false;
    std::size_t d_depth = DeriveLimits{}.max_depth;
    auto* cmd_derive = app.add_subcommand("derive", "find and check a hyperresolution derivation");
    cmd_derive->add_option("program", d_prog, "program file")->required();
    cmd_derive->add_option("data", d_data, "dataset file")->required();
    cmd_derive->add_option("--goal", d_goal, "ground goal disjunction")->required();
    cmd_derive->add_flag("--dot", d_dot, "emit the derivation in DOT format");
    cmd_derive->add_option("--max-depth", d_depth, "derivation depth cap");

    // --- rlor-compile -----------------------------------------------------
    std::string o_file;
    auto* cmd_rlor = app.add_subcommand("rlor-compile", "compile an ontology into a program");
    cmd_rlor->add_option("file", o_file, "ontology file")->required();

    // --- check-equiv ------------------------------------------------------
    std::string q_left, q_right, q_preds, q_theta;
    int q_max_constants = 3, q_max_facts = 6;
    auto* cmd_equiv = app.add_subcommand(
        "check-equiv", "compare two programs over all small datasets");
    cmd_equiv->add_option("original", q_left, "original program file")->required();
    cmd_equiv->add_option("rewriting", q_right, "rewritten program file")->required();
    cmd_equiv->add_option("--preds", q_preds, "comma-separated predicates to compare (default: all)");
    cmd_equiv->add_option("--theta", q_theta, "predicate renaming as old=new,old=new");
    cmd_equiv->add_option("--max-constants", q_max_constants, "fresh constants in the pool");
    cmd_equiv->add_option("--max-facts", q_max_facts, "facts per dataset");

    // --- gen --------------------------------------------------------------
    std::uint64_t g_seed = 0;
    std::string g_filter = "none";
    GenConfig g_cfg;
    auto* cmd_gen = app.add_subcommand("gen", "generate a seeded random program");
    cmd_gen->add_option("--seed", g_seed, "random seed")->required();
    cmd_gen->add_option("--filter", g_filter, "none | datalog | linear | wl")
        ->check(CLI::IsMember({"none", "datalog", "linear", "wl"}));
    cmd_gen->add_option("--predicates", g_cfg.predicates, "number of predicates");
    cmd_gen->add_option("--rules", g_cfg.rules, "number of rules");
    cmd_gen->add_option("--max-arity", g_cfg.max_arity, "maximum predicate arity");
    cmd_gen->add_option("--max-body", g_cfg.max_body, "maximum body atoms per rule");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();  // let the global --json / -o follow the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_validate) {
            Program p = load_program(v_file);
            if (as_json)
                emit(json{{"ok", true}, {"rules", p.rules.size()}}.dump(2), out_path);
            else
                emit("ok: " + std::to_string(p.rules.size()) + " rules\n", out_path);
            return 0;
        }

        if (*cmd_classify) {
            Program p = load_program(c_file);
            auto cls = classify_predicates(p);
            if (c_dot) {
                emit(export_dot(dependency_graph(p), cls), out_path);
                return 0;
            }
            bool wl = static_cast<bool>(is_wl(p));
            bool lin = static_cast<bool>(is_linear(p));
            std::set<std::string> disj, dl;
            for (const auto& [name, k] : cls.cls)
                (k == PredicateClass::Disjunctive ? disj : dl).insert(name);
            if (as_json) {
                emit(json{{"wl", wl},
                          {"linear", lin},
                          {"disjunctive", disj},
                          {"datalog", dl}}
                         .dump(2),
                     out_path);
            } else {
                auto braces = [](const std::set<std::string>& s) {
                    std::string t = "{";
                    for (const auto& n : s) t += (t.size() > 1 ? "," : "") + n;
                    return t + "}";
                };
                emit("WL: " + std::string(wl ? "yes" : "no") +
                         "; linear: " + (lin ? "yes" : "no") + "; disjunctive: " + braces(disj) +
                         "; datalog: " + braces(dl) + "\n",
                     out_path);
            }
            return 0;
        }

        if (*cmd_rewrite) {
            Program p = load_program(r_file);
            std::set<std::string> goals = split_names(r_goals);
            Program result;
            json meta;
            if (r_mode == "psi") {
                if (!goals.empty()) {
                    std::cerr << "error: --goal applies to xi, xi-prime and auto only\n";
                    return 2;
                }
                auto out = psi(p);
                result = out.program;
                json theta;
                for (const auto& [from, to] : out.theta.map) theta[from] = to.name;
                meta["theta"] = std::move(theta);
            } else if (r_mode == "xi" || r_mode == "xi-prime") {
                RewriteOutput out = (r_mode == "xi") ? xi(p) : xi_prime(p);
                result = goals.empty() ? out.program : prune_for_goals(out, goals);
            } else {  // auto
                RewriteConfig cfg;
                cfg.max_steps = r_max_steps;
                LineariseResult res = rewrite(p, cfg);
                meta["trace"] = trace_json(res.trace);
                if (!res.success) {
                    std::cerr << "error: rewriting gave up: " << to_string(res.trace.outcome)
                              << "\n";
                    if (as_json) emit(meta.dump(2), out_path);
                    return 1;
                }
                json theta;
                for (const auto& [from, to] : res.theta.map) theta[from] = to.name;
                meta["theta"] = std::move(theta);
                result =
                    goals.empty() ? res.rewriting.program : prune_for_goals(res.rewriting, goals);
            }
            if (as_json) {
                meta["program"] = program_json(result);
                emit(meta.dump(2), out_path);
            } else {
                emit(print_program(result), out_path);
                if (meta.contains("trace"))
                    std::cerr << "trace: " << meta["trace"].dump() << "\n";
            }
            return 0;
        }

        if (*cmd_prune) {
            Program p = load_program(p_file);
            Program pruned = prune_for_goals(xi_prime(p), split_names(p_goals));
            if (as_json)
                emit(json{{"program", program_json(pruned)}}.dump(2), out_path);
            else
                emit(print_program(pruned), out_path);
            return 0;
        }

        if (*cmd_eval) {
            if (e_engine && e_oracle) {
                std::cerr << "error: choose one of --engine and --oracle\n";
                return 2;
            }
            Program p = load_program(e_prog);
            Dataset d = parse_dataset(slurp(e_data));
            bool use_oracle = e_oracle || (!e_engine && !p.is_datalog());
            EvalResult r = use_oracle ? cautious_eval(p, d) : evaluate(p, d);
            emit(as_json ? eval_json(r).dump(2) : eval_text(r), out_path);
            return 0;
        }

        if (*cmd_entail) {
            Program p = load_program(n_prog);
            Dataset d = parse_dataset(slurp(n_data));
            std::vector<Atom> goal = parse_goal(n_goal);
            bool yes;
            if (!n_oracle && p.is_datalog() && goal.size() == 1)
                yes = entails(p, d, goal[0]);
            else
                yes = entails_oracle(p, d, goal);
            if (as_json)
                emit(json{{"entailed", yes}}.dump(2), out_path);
            else
                emit(std::string("entailed: ") + (yes ? "yes" : "no") + "\n", out_path);
            return 0;
        }

        if (*cmd_derive) {
            Program p = load_program(d_prog);
            Dataset d = parse_dataset(slurp(d_data));
            std::vector<Atom> goal = parse_goal(d_goal);
            DeriveLimits lim;
            lim.max_depth = d_depth;
            auto rho = find_derivation(p, d, goal, lim);
            if (!rho) {
                std::cerr << "error: no derivation found within the limits\n";
                return 1;
            }
            auto rep = check_derivation(p, d, *rho, goal);
            if (!rep) {
                std::cerr << "error: internal check failed: " << rep.error << "\n";
                return 1;
            }
            emit(d_dot ? export_dot(*rho) : export_text(rho->root), out_path);
            return 0;
        }

        if (*cmd_rlor) {
            Program p = compile_ontology(slurp(o_file));
            if (as_json)
                emit(json{{"program", program_json(p)}}.dump(2), out_path);
            else
                emit(print_program(p), out_path);
            return 0;
        }

        if (*cmd_equiv) {
            Program p = load_program(q_left);
            Program p2 = load_program(q_right);
            std::set<std::string> preds = split_names(q_preds);
            if (preds.empty())
                for (const auto& [name, q] : signature_of(p).predicates)
                    if (q.builtin == Builtin::None) preds.insert(name);
            Renaming theta;
            for (const auto& pair : split_names(q_theta)) {
                auto eq = pair.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "error: --theta expects old=new pairs\n";
                    return 2;
                }
                std::string from = pair.substr(0, eq), to = pair.substr(eq + 1);
                auto it = signature_of(p).predicates.find(from);
                if (it == signature_of(p).predicates.end()) {
                    std::cerr << "error: unknown predicate in --theta: " << from << "\n";
                    return 2;
                }
                theta.map[from] = Predicate{to, it->second.arity, Builtin::None};
            }
            EquivReport rep =
                check_rewriting(p, p2, theta, preds, ExhaustiveBounds{q_max_constants, q_max_facts});
            if (as_json) {
                json j{{"pass", rep.pass},
                       {"datasets", rep.datasets_tested},
                       {"skipped", rep.skipped},
                       {"seconds", rep.seconds}};
                if (rep.counterexample) {
                    j["counterexample"] = {{"dataset", print_dataset(rep.counterexample->dataset)},
                                           {"detail", rep.counterexample->detail}};
                }
                emit(j.dump(2), out_path);
            } else if (rep.pass) {
                emit("pass: " + std::to_string(rep.datasets_tested) + " datasets, " +
                         std::to_string(rep.skipped) + " skipped\n",
                     out_path);
            } else {
                emit("FAIL: " + rep.counterexample->detail + "\ndataset:\n" +
                         print_dataset(rep.counterexample->dataset),
                     out_path);
            }
            return rep.pass ? 0 : 1;
        }

        if (*cmd_gen) {
            g_cfg.seed = g_seed;
            GenFilter f = GenFilter::None;
            if (g_filter == "datalog") f = GenFilter::Datalog;
            else if (g_filter == "linear") f = GenFilter::Linear;
            else if (g_filter == "wl") f = GenFilter::WeaklyLinear;
            Program p = random_program(g_cfg, f);
            emit(print_program(p), out_path);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
