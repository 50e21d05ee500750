// Acceptance gate: one line per criterion, pass/fail, with timings.
// Usage: acceptance_tests <data-dir>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

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

using namespace wldlog;

namespace {

std::string g_data;
int g_failures = 0;

std::string slurp(const std::string& name) {
    std::ifstream in(g_data + "/" + name);
    if (!in) throw std::runtime_error("cannot open " + g_data + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load_program(const std::string& name) { return parse_program(slurp(name)); }
Dataset load_dataset(const std::string& name) { return parse_dataset(slurp(name)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, bool pass, double secs, const std::string& detail = "") {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL");
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%.2fs)", secs);
    std::cout << buf;
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

std::multiset<std::string> rule_keys(const Program& p) {
    std::multiset<std::string> ks;
    for (const auto& r : p.rules)
        if (!r.top_rule) ks.insert(canonical_key(r));
    return ks;
}

bool contains_rule(const Program& p, const Rule& r) {
    for (const auto& s : p.rules)
        if (!s.top_rule && canonical_key(s) == canonical_key(r)) return true;
    return false;
}

std::set<std::string> user_predicates(const Program& p) {
    std::set<std::string> s;
    for (const auto& [name, pred] : signature_of(p).predicates)
        if (pred.builtin == Builtin::None) s.insert(name);
    return s;
}

Atom ua(const std::string& p, const std::string& c) {
    return Atom{Predicate{p, 1, Builtin::None}, {cst(c)}};
}

GenConfig base_config(std::uint64_t seed) {
    GenConfig cfg;  // 4 predicates, arity <= 2, 6 rules, <= 3 body atoms
    cfg.max_binary_preds = 1;
    cfg.seed = seed;
    return cfg;
}

// ---------------------------------------------------------------------------

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;

    // the rewriting of the colouring program: six schemas for goals b and g
    Program p1 = load_program("p1.dl");
    auto xi1 = xi(p1);
    Program expected_xi = parse_program(
        "b(Z) :- v(X), b^b(X, Z), g^b(X, Z).\n"
        "g(Z) :- v(X), b^g(X, Z), g^g(X, Z).\n"
        "g^b(Y, Z) :- b^b(X, Z), e(X, Y).\n"
        "g^g(Y, Z) :- b^g(X, Z), e(X, Y).\n"
        "b^b(Y, Z) :- g^b(X, Z), e(X, Y).\n"
        "b^g(Y, Z) :- g^g(X, Z), e(X, Y).\n"
        "b^b(X, X) :- top(X).\n"
        "g^g(X, X) :- top(X).\n"
        "b(Z) :- b(X), b^b(X, Z).\n"
        "g(Z) :- b(X), b^g(X, Z).\n"
        "b(Z) :- g(X), g^b(X, Z).\n"
        "g(Z) :- g(X), g^g(X, Z).\n",
        true);
    if (rule_keys(xi1.program) != rule_keys(expected_xi)) {
        pass = false;
        detail += "xi(p1) differs from the expected twelve rules; ";
    }

    // the reverse rewriting of the path-accessibility program
    Program p2 = load_program("p2.dl");
    auto psi2 = psi(p2);
    Program displayed = parse_program(
        "r^a'(X, Y, Z, U) | a'^a'(Y, U) | a'^a'(Z, U) :- top(Y), top(Z), a'^a'(X, U).\n"
        "a^a'(X, Y) :- a'^a'(X, Y).\n"
        "a'^a'(X, X) :- top(X).\n"
        "a'(Y) :- a(X), a^a'(X, Y).\n"
        "a'(U) :- r(X, Y, Z), r^a'(X, Y, Z, U).\n",
        true);
    for (const auto& r : displayed.rules)
        if (!contains_rule(psi2.program, r)) {
            pass = false;
            detail += "psi(p2) misses a displayed rule; ";
            break;
        }

    // linearisation by one unfolding
    Program p4 = load_program("p4.dl");
    auto res = rewrite(p4);
    Rule r13 = parse_program("c'(X) | d'(X) :- a(X), b'(X).", true).rules[0];
    Rule r14 = parse_program("c'(X) | d'(X) | f'(X) :- e(X), b'(X).", true).rules[0];
    if (!res.success || res.trace.steps.size() != 1 || res.trace.steps[0].resolvents != 2 ||
        !contains_rule(res.intermediate, r13) || !contains_rule(res.intermediate, r14)) {
        pass = false;
        detail += "rewrite(p4) is not the expected single unfolding; ";
    }

    double secs = seconds_since(t0);
    if (secs >= 3.0) {  // three transformations, < 1 s each
        pass = false;
        detail += "too slow; ";
    }
    report(1, pass, secs, detail);
}

void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    Program p1 = load_program("p1.dl");
    Dataset d1 = load_dataset("d1.facts");
    Atom goal = ua("b", "a");
    auto xi1 = xi(p1);
    if (!entails(xi1.program, d1, goal)) {
        pass = false;
        detail += "engine misses b(a); ";
    }
    if (!entails_oracle(p1, d1, goal)) {
        pass = false;
        detail += "oracle misses b(a); ";
    }
    auto rho1 = find_derivation(p1, d1, {goal});
    if (!rho1 || !check_derivation(p1, d1, *rho1, {goal})) {
        pass = false;
        detail += "no valid derivation from the original; ";
    }
    auto rho2 = find_derivation(xi1.program, d1, {goal});
    if (!rho2 || !check_derivation(xi1.program, d1, *rho2, {goal})) {
        pass = false;
        detail += "no valid derivation from the rewriting; ";
    }
    double secs = seconds_since(t0);
    if (secs >= 1.0) {
        pass = false;
        detail += "too slow; ";
    }
    report(2, pass, secs, detail);
}

void criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    Program p1 = load_program("p1.dl");
    if (!is_linear(p1) || !is_wl(p1)) {
        pass = false;
        detail += "p1 should be linear and WL; ";
    }

    Program p3 = load_program("p3.dl");
    auto cls3 = classify_predicates(p3);
    if (!is_wl(p3) || is_linear(p3) || !cls3.is_disjunctive("b") || !cls3.is_disjunctive("g") ||
        cls3.is_disjunctive("e") || cls3.is_disjunctive("v")) {
        pass = false;
        detail += "p3 classification mismatch; ";
    }

    Program p4 = load_program("p4.dl");
    auto wl4 = is_wl(p4);
    std::set<std::string> offending;
    for (const auto& o : wl4.offenders)
        if (o.rule == p4.rules[0].id) offending.insert(o.atom.pred.name);
    if (wl4.holds || offending != std::set<std::string>{"a", "b"}) {
        pass = false;
        detail += "p4 should fail WL at its first rule on a and b; ";
    }

    report(3, pass, seconds_since(t0), detail);
}

std::vector<Program> g_wl_programs;  // criterion 4 corpus, reused by criterion 6

void criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 200 && pass; ++seed) {
        Program p = random_program(base_config(seed), GenFilter::WeaklyLinear);
        g_wl_programs.push_back(p);
        auto out = xi_prime(p);
        auto rep = check_rewriting(p, out.program, Renaming{}, user_predicates(p),
                                   ExhaustiveBounds{3, 6});
        if (!rep.pass) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + rep.counterexample->detail;
        }
    }
    double secs = seconds_since(t0);
    if (secs > 600.0) {
        pass = false;
        detail += " over the 10 minute budget";
    }
    report(4, pass, secs, detail);
}

std::vector<Program> g_dl_programs;  // criterion 5 corpus, reused by criterion 6

void criterion5() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 200 && pass; ++seed) {
        Program p = random_program(base_config(seed + 5000), GenFilter::Datalog);
        g_dl_programs.push_back(p);
        auto out = psi(p);
        auto rep = check_rewriting(p, out.program, out.theta, user_predicates(p),
                                   ExhaustiveBounds{3, 6});
        if (!rep.pass) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": " + rep.counterexample->detail;
        }
    }
    double secs = seconds_since(t0);
    if (secs > 600.0) {
        pass = false;
        detail += " over the 10 minute budget";
    }
    report(5, pass, secs, detail);
}

void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    auto max_arity = [](const Program& p) {
        int m = 1;
        for (const auto& [n, q] : signature_of(p).predicates)
            if (q.builtin == Builtin::None) m = std::max(m, q.arity);
        return m;
    };

    for (const Program& p : g_wl_programs) {
        auto out = xi_prime(p);
        std::size_t np = p.rules.size() + 1;  // plus the implicit bot rule
        std::size_t ns = out.sigma.size();
        if (out.program.rules.size() > np * (ns + 2) + ns * ns ||
            max_arity(out.program) > 2 * max_arity(p)) {
            pass = false;
            detail = "xi_prime size/arity bound violated";
            break;
        }
    }
    for (const Program& p : g_dl_programs) {
        if (!pass) break;
        auto [pe, theta] = idb_expansion(p);
        auto out = psi(p);
        std::size_t n = pe.rules.size() + 1;
        auto idb = idb_predicates(pe);
        std::size_t ne = 1;  // the top collector
        for (const auto& [name, q] : signature_of(pe).predicates)
            if (q.builtin == Builtin::None && !idb.count(q)) ++ne;
        if (out.program.rules.size() > idb.size() * (n + 1 + ne) ||
            max_arity(out.program) > 2 * max_arity(p)) {
            pass = false;
            detail = "psi size/arity bound violated";
        }
    }
    report(6, pass, seconds_since(t0), detail);
}

void criterion7() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    int tested = 0;
    std::uint64_t seed = 9000;
    while (tested < 100 && pass) {
        Program p = random_program(base_config(seed++));
        auto idb = idb_predicates(p);
        // first rule with an IDB body atom
        RuleId rid = -1;
        std::size_t aidx = 0;
        for (const auto& r : p.rules) {
            for (std::size_t i = 0; i < r.body.size() && rid < 0; ++i)
                if (idb.count(r.body[i].pred)) {
                    rid = r.id;
                    aidx = i;
                }
            if (rid >= 0) break;
        }
        if (rid < 0) continue;
        ++tested;

        Program p2 = unfold(p, rid, aidx).program;

        // datasets range over the EDB-only signature of p
        Signature edb_sig;
        edb_sig.constants = signature_of(p).constants;
        for (const auto& [name, q] : signature_of(p).predicates)
            if (q.builtin == Builtin::None && !idb.count(q)) edb_sig.predicates.emplace(name, q);

        Signature merged = signature_of(p);
        for (const auto& [name, q] : signature_of(p2).predicates) merged.predicates.emplace(name, q);
        std::set<std::string> pool = merged.constants;
        for (int i = 1; i <= 2; ++i) pool.insert("c" + std::to_string(i));
        GroundOracle left(p, pool, {}, merged);
        GroundOracle right(p2, pool, {}, merged);

        enumerate_datasets(edb_sig, 6, 2, [&](const Dataset& d) {
            EvalResult a = left.cautious(d);
            EvalResult b = right.cautious(d);
            if (a.unsat != b.unsat || a.facts != b.facts) {
                pass = false;
                detail = "unfolding changed the evaluation (seed " + std::to_string(seed - 1) + ")";
                return false;
            }
            return true;
        });
    }
    report(7, pass, seconds_since(t0), detail);
}

void criterion8() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    Program noncol = compile_ontology(slurp("noncol.rlor"));
    if (!cautious_eval(noncol, load_dataset("k4.facts")).unsat) {
        pass = false;
        detail += "K4 should be unsatisfiable; ";
    }
    if (cautious_eval(noncol, load_dataset("triangle.facts")).unsat) {
        pass = false;
        detail += "the triangle should be consistent; ";
    }

    Program small = compile_ontology(slurp("small.rlor"));
    if (!is_wl(small)) {
        pass = false;
        detail += "the small ontology should be WL; ";
    } else {
        auto out = xi_prime(small);
        auto rep = check_rewriting(small, out.program, Renaming{}, user_predicates(small),
                                   ExhaustiveBounds{1, 2});
        if (!rep.pass) {
            pass = false;
            detail += "ontology round-trip disagrees with the oracle; ";
        }
    }

    double secs = seconds_since(t0);
    if (secs >= 5.0) {
        pass = false;
        detail += "too slow; ";
    }
    report(8, pass, secs, detail);
}

void criterion9() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 500 && pass; ++seed) {
        Program p = random_program(base_config(seed + 20000), GenFilter::Datalog);
        std::mt19937_64 rng(seed);
        auto universe = atom_universe(signature_of(p), 2);
        Dataset d;
        for (const auto& a : universe)
            if (rng() % 3 == 0) d.facts.insert(a);

        EvalResult fast = evaluate(p, d);
        EvalResult slow = evaluate_naive(p, d);
        EvalResult orc = cautious_eval(p, d);
        if (fast.unsat != slow.unsat || fast.facts != slow.facts || fast.unsat != orc.unsat ||
            fast.facts != orc.facts) {
            pass = false;
            detail = "evaluators disagree at seed " + std::to_string(seed);
            break;
        }
        if (!fast.unsat) {
            for (const auto& c : constants_of(p, d))
                if (!fast.holds(Atom{top_pred(), {cst(c)}})) {
                    pass = false;
                    detail = "top closure violated at seed " + std::to_string(seed);
                }
            // monotonicity: adding one fact never loses facts
            if (!universe.empty()) {
                Dataset d2 = d;
                d2.facts.insert(universe[seed % universe.size()]);
                EvalResult bigger = evaluate(p, d2);
                if (!bigger.unsat)
                    for (const auto& f : fast.facts)
                        if (!bigger.holds(f)) {
                            pass = false;
                            detail = "monotonicity violated at seed " + std::to_string(seed);
                        }
            }
        }
    }
    report(9, pass, seconds_since(t0), detail);
}

void criterion10() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    int tested = 0;
    std::uint64_t seed = 42000;
    while (tested < 50 && pass) {
        Program p = random_program(base_config(seed++), GenFilter::WeaklyLinear);
        auto preds = user_predicates(p);
        if (preds.empty()) continue;
        ++tested;
        auto it = preds.begin();
        std::advance(it, static_cast<long>(seed % preds.size()));
        std::string goal = *it;

        auto out = xi_prime(p);
        Program pruned = prune_for_goals(out, {goal});
        auto rep = check_rewriting(p, pruned, Renaming{}, {goal}, ExhaustiveBounds{2, 4});
        if (!rep.pass) {
            pass = false;
            detail = "pruned rewriting disagrees on goal " + goal + " (seed " +
                     std::to_string(seed - 1) + ")";
        }
    }
    report(10, pass, seconds_since(t0), detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance_tests <data-dir>\n";
        return 2;
    }
    g_data = argv[1];
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
        criterion8();
        criterion9();
        criterion10();
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return g_failures == 0 ? 0 : 1;
}
