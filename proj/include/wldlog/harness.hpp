#pragma once

// Random program generation, exhaustive dataset enumeration, and the
// bounded equivalence checker that compares a program against a claimed
// rewriting over every dataset within the bounds.

#include <chrono>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "ast.hpp"
#include "engine.hpp"
#include "oracle.hpp"
#include "print.hpp"

namespace wldlog {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenConfig {
    int predicates = 4;
    int max_arity = 2;
    int rules = 6;
    int max_body = 3;
    double disj_prob = 0.4;
    int constants = 3;        // pool size for dataset generation
    int max_binary_preds = -1;  // cap on predicates of arity > 1; -1 = no cap
    std::uint64_t seed = 0;
};

enum class GenFilter { None, Datalog, Linear, WeaklyLinear };

// Safe by construction: head variables are drawn from the body. A pure
// function of the config (including the seed). Filters regenerate until the
// predicate holds and give up after a fixed number of attempts.
inline Program random_program(const GenConfig& cfg, GenFilter filter = GenFilter::None) {
    if (cfg.predicates < 1 || cfg.max_arity < 1 || cfg.rules < 1 || cfg.max_body < 1)
        throw GenerationError("generator bounds must be positive");
    std::mt19937_64 rng(cfg.seed);
    auto rnd = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    auto coin = [&](double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
    };

    const int attempts = 1000;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        // arities lean unary so that the ground-atom universe stays small
        std::vector<Predicate> preds;
        int binaries = 0;
        for (int i = 0; i < cfg.predicates; ++i) {
            int arity = 1;
            bool cap_hit = cfg.max_binary_preds >= 0 && binaries >= cfg.max_binary_preds;
            if (cfg.max_arity > 1 && !cap_hit && coin(0.25)) {
                arity = 2 + rnd(cfg.max_arity - 1);
                ++binaries;
            }
            preds.push_back(Predicate{"p" + std::to_string(i), arity, Builtin::None});
        }
        auto rnd_var = [&](int pool) { return var("V" + std::to_string(rnd(pool))); };

        std::vector<Rule> raw;
        for (int i = 0; i < cfg.rules; ++i) {
            Rule r;
            int var_pool = 2 + rnd(2);
            int nbody = 1 + rnd(cfg.max_body);
            for (int b = 0; b < nbody; ++b) {
                const Predicate& q = preds[static_cast<std::size_t>(rnd(cfg.predicates))];
                std::vector<Term> args;
                for (int a = 0; a < q.arity; ++a) args.push_back(rnd_var(var_pool));
                r.body.push_back(Atom{q, std::move(args)});
            }
            std::vector<Term> bvars;
            for (const auto& v : r.body_vars()) bvars.push_back(var(v));
            auto head_atom = [&]() {
                const Predicate& q = preds[static_cast<std::size_t>(rnd(cfg.predicates))];
                std::vector<Term> args;
                for (int a = 0; a < q.arity; ++a)
                    args.push_back(bvars[static_cast<std::size_t>(rnd(
                        static_cast<int>(bvars.size())))]);
                return Atom{q, std::move(args)};
            };
            if (coin(0.1)) {
                r.head.push_back(Atom{bot_pred(), {}});
            } else {
                r.head.push_back(head_atom());
                if (coin(cfg.disj_prob)) r.head.push_back(head_atom());
            }
            raw.push_back(std::move(r));
        }

        Program p;
        try {
            p = validate_program(std::move(raw));
        } catch (const ValidationError&) {
            continue;  // e.g. a duplicate head collapsed a rule oddly; retry
        }
        bool ok = true;
        switch (filter) {
            case GenFilter::None: break;
            case GenFilter::Datalog: ok = p.is_datalog(); break;
            case GenFilter::Linear: ok = static_cast<bool>(is_linear(p)); break;
            case GenFilter::WeaklyLinear: ok = static_cast<bool>(is_wl(p)); break;
        }
        if (ok) return p;
    }
    throw GenerationError("filter starvation: no admissible program in 1000 attempts");
}

// ---------------------------------------------------------------------------
// Dataset enumeration

// The ground-atom universe over the non-builtin predicates of sig and the
// pool c1..cK plus sig's own constants.
inline std::vector<Atom> atom_universe(const Signature& sig, int max_constants) {
    std::set<std::string> cs = sig.constants;
    for (int i = 1; i <= max_constants; ++i) cs.insert("c" + std::to_string(i));
    std::vector<std::string> pool(cs.begin(), cs.end());
    std::vector<Atom> universe;
    for (const auto& [name, pred] : sig.predicates) {
        if (pred.builtin != Builtin::None) continue;
        std::vector<std::size_t> odo(static_cast<std::size_t>(pred.arity), 0);
        for (;;) {
            std::vector<Term> args;
            for (std::size_t i = 0; i < odo.size(); ++i) args.push_back(cst(pool[odo[i]]));
            universe.push_back(Atom{pred, std::move(args)});
            std::size_t k = 0;
            while (k < odo.size() && ++odo[k] == pool.size()) odo[k++] = 0;
            if (k == odo.size()) break;
        }
    }
    return universe;
}

// Visits every dataset with at most max_facts facts drawn from the
// universe, the empty dataset first; stops early when visit returns false.
// Returns the number of datasets visited.
inline std::size_t enumerate_datasets(const Signature& sig, int max_facts, int max_constants,
                                      const std::function<bool(const Dataset&)>& visit) {
    std::vector<Atom> universe = atom_universe(sig, max_constants);
    std::size_t n = universe.size();
    std::size_t count = 0;

    // subsets by size: combination odometer over atom indices
    for (int size = 0; size <= max_facts && static_cast<std::size_t>(size) <= n; ++size) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(size));
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (;;) {
            Dataset d;
            for (std::size_t i : idx) d.facts.insert(universe[i]);
            ++count;
            if (!visit(d)) return count;
            // next combination
            if (size == 0) break;
            std::size_t k = idx.size();
            while (k > 0 && idx[k - 1] == n - (idx.size() - (k - 1))) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// Rewriting equivalence

struct Counterexample {
    Dataset dataset;
    std::string detail;  // the differing fact, or an unsat mismatch note
};

struct EquivReport {
    bool pass = true;
    std::size_t datasets_tested = 0;
    std::size_t skipped = 0;  // resource-cap hits
    std::optional<Counterexample> counterexample;
    double seconds = 0.0;
};

struct ExhaustiveBounds {
    int max_constants = 3;
    int max_facts = 6;
};

namespace detail {

// eval restricted to predicates in S (bot always compared, top never)
struct RestrictedEval {
    bool unsat = false;
    std::set<Atom> facts;
};

inline RestrictedEval restrict_eval(const EvalResult& r, const std::set<std::string>& pred_names) {
    RestrictedEval out;
    out.unsat = r.unsat;
    if (r.unsat) return out;
    for (const auto& f : r.facts)
        if (pred_names.count(f.pred.name)) out.facts.insert(f);
    return out;
}

}  // namespace detail

// Compares eval(p, d) restricted to s, with theta applied, against
// eval(p2, d) restricted to s theta, over every dataset the strategy
// yields. Each side uses the engine when its program is datalog and the
// ground oracle otherwise. bot is always part of the comparison; top never.
inline EquivReport check_rewriting(const Program& p, const Program& p2, const Renaming& theta,
                                   const std::set<std::string>& s, const ExhaustiveBounds& bounds,
                                   const OracleLimits& lim = {}) {
    Signature sig = signature_of(p);
    for (const auto& name : s)
        if (!sig.predicates.count(name) && !is_reserved_name(name))
            throw ValidationError("compared predicate not in the program: " + name);

    auto started = std::chrono::steady_clock::now();
    EquivReport rep;

    std::set<std::string> s_theta;
    for (const auto& name : s) {
        auto it = sig.predicates.find(name);
        s_theta.insert(it != sig.predicates.end() ? theta.apply(it->second).name : name);
    }

    std::set<std::string> pool_constants = sig.constants;
    std::vector<std::string> fresh;  // pool constants mentioned by neither program
    for (int i = 1; i <= bounds.max_constants; ++i) {
        std::string c = "c" + std::to_string(i);
        if (pool_constants.insert(c).second && !signature_of(p2).constants.count(c))
            fresh.push_back(c);
    }

    // Fresh constants are interchangeable: neither program mentions them, so
    // datasets equal up to a permutation of them behave identically on both
    // sides. Only the lexicographically least member of each orbit is tested.
    std::vector<std::map<std::string, std::string>> perms;
    {
        std::vector<std::string> img = fresh;
        while (std::next_permutation(img.begin(), img.end())) {
            std::map<std::string, std::string> pi;
            for (std::size_t i = 0; i < fresh.size(); ++i) pi[fresh[i]] = img[i];
            perms.push_back(std::move(pi));
        }
    }
    auto dataset_key = [](const Dataset& d) {
        std::string key;
        for (const auto& f : d.facts) key += print_atom(f) + ";";
        return key;
    };
    auto is_orbit_representative = [&](const Dataset& d) {
        if (perms.empty()) return true;
        std::string key = dataset_key(d);
        for (const auto& pi : perms) {
            Dataset mapped;
            for (const auto& f : d.facts) {
                Atom a = f;
                for (auto& t : a.args) {
                    auto it = pi.find(t.name);
                    if (it != pi.end()) t.name = it->second;
                }
                mapped.facts.insert(std::move(a));
            }
            if (dataset_key(mapped) < key) return false;
        }
        return true;
    };

    std::optional<GroundOracle> left_oracle, right_oracle;
    std::optional<Evaluator> left_eval, right_eval;
    if (p.is_datalog())
        left_eval.emplace(p);
    else
        left_oracle.emplace(p, pool_constants, lim);
    if (p2.is_datalog()) {
        right_eval.emplace(p2);
    } else {
        // datasets range over p's signature, which p2 need not mention fully
        Signature merged = signature_of(p2);
        for (const auto& [name, pred] : sig.predicates)
            merged.predicates.emplace(name, pred);
        right_oracle.emplace(p2, pool_constants, lim, merged);
    }

    std::set<std::string> s_with_bot = s;
    s_with_bot.insert("bot");
    std::set<std::string> s_theta_with_bot = s_theta;
    s_theta_with_bot.insert("bot");

    auto eval_side = [&](std::optional<Evaluator>& eng, std::optional<GroundOracle>& oracle,
                         const std::set<std::string>& preds, const Dataset& d) {
        if (eng) return detail::restrict_eval((*eng)(d), preds);
        return detail::restrict_eval(oracle->cautious(d, &preds), preds);
    };

    enumerate_datasets(sig, bounds.max_facts, bounds.max_constants, [&](const Dataset& d) {
        if (!is_orbit_representative(d)) return true;
        ++rep.datasets_tested;
        detail::RestrictedEval lhs, rhs;
        try {
            lhs = eval_side(left_eval, left_oracle, s_with_bot, d);
            rhs = eval_side(right_eval, right_oracle, s_theta_with_bot, d);
        } catch (const ResourceCapError&) {
            ++rep.skipped;
            return true;
        }
        if (lhs.unsat != rhs.unsat) {
            rep.pass = false;
            rep.counterexample = {d, lhs.unsat ? "original unsatisfiable, rewriting is not"
                                               : "rewriting unsatisfiable, original is not"};
            return false;
        }
        if (lhs.unsat) return true;
        std::set<Atom> mapped;
        for (const auto& f : lhs.facts) mapped.insert(theta.apply(f));
        if (mapped != rhs.facts) {
            rep.pass = false;
            for (const auto& f : mapped)
                if (!rhs.facts.count(f)) {
                    rep.counterexample = {d, "only the original entails " + print_atom(f)};
                    return false;
                }
            for (const auto& f : rhs.facts)
                if (!mapped.count(f)) {
                    rep.counterexample = {d, "only the rewriting entails " + print_atom(f)};
                    return false;
                }
        }
        return true;
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rep;
}

}  // namespace wldlog
