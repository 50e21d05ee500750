#pragma once

// Bottom-up evaluation of datalog programs: a semi-naive fixpoint engine
// (the workhorse) and a naive reference evaluator used to cross-check it.
// Both seed the top predicate over the active constants and add equality
// congruence rules whenever eq occurs.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"

namespace wldlog {

struct EvalResult {
    bool unsat = false;
    std::set<Atom> facts;  // empty when unsat

    bool holds(const Atom& a) const { return unsat || facts.count(a) > 0; }
};

namespace detail {

using FactIndex = std::map<std::string, std::vector<const Atom*>>;

inline FactIndex index_facts(const std::set<Atom>& facts) {
    FactIndex ix;
    for (const auto& f : facts) ix[f.pred.name].push_back(&f);
    return ix;
}

using Env = std::map<std::string, Term>;

inline bool match_atom(const Atom& pattern, const Atom& fact, Env& env,
                       std::vector<std::string>& bound) {
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& t = pattern.args[i];
        const Term& c = fact.args[i];
        if (!t.is_var()) {
            if (t == c) continue;
            return false;
        }
        auto it = env.find(t.name);
        if (it != env.end()) {
            if (it->second == c) continue;
            return false;
        }
        env.emplace(t.name, c);
        bound.push_back(t.name);
    }
    return true;
}

inline Atom instantiate(const Atom& pattern, const Env& env) {
    Atom a = pattern;
    for (auto& t : a.args) {
        if (!t.is_var()) continue;
        auto it = env.find(t.name);
        if (it == env.end()) throw std::logic_error("unbound variable in head: " + t.name);
        t = it->second;
    }
    return a;
}

// Joins the rule body left to right; the atom at delta_pos draws from the
// delta index, all others from the full index. delta_pos == npos means every
// atom draws from full (naive evaluation).
template <typename Sink>
inline void eval_rule_join(const Rule& r, std::size_t delta_pos, const FactIndex& full,
                           const FactIndex& delta, Sink&& sink) {
    Env env;
    std::vector<std::size_t> order(r.body.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // start the join at the delta atom: it is usually the most selective
    if (delta_pos < order.size()) std::swap(order[0], order[delta_pos]);

    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == order.size()) {
            for (const auto& h : r.head) sink(instantiate(h, env));
            return;
        }
        std::size_t pos = order[k];
        const FactIndex& src = (pos == delta_pos) ? delta : full;
        auto it = src.find(r.body[pos].pred.name);
        if (it == src.end()) return;
        for (const Atom* f : it->second) {
            std::vector<std::string> bound;
            if (match_atom(r.body[pos], *f, env, bound)) self(self, k + 1);
            for (const auto& v : bound) env.erase(v);
        }
    };
    rec(rec, 0);
}

constexpr std::size_t kNoDelta = static_cast<std::size_t>(-1);

}  // namespace detail

// Prepares the rule set and the seed facts shared by both evaluators:
// top-augmentation, equality congruence when eq occurs, dataset facts plus
// top(c) for every active constant. Empty-body rules fire into the seeds.
namespace detail {

struct PreparedProgram {
    std::vector<Rule> rules;  // nonempty bodies only
    std::set<Atom> seeds;
};

inline PreparedProgram prepare(const Program& p, const Dataset& d) {
    if (!p.is_datalog()) throw NotDatalogError("the evaluator requires a datalog program");
    PreparedProgram out;
    Program full = augment_top(p);
    std::vector<Rule> rules = full.rules;
    if (signature_of(full, d).predicates.count("eq"))
        for (auto& r : equality_axioms(signature_of(full, d))) rules.push_back(std::move(r));

    out.seeds = d.facts;
    for (const auto& c : constants_of(p, d)) out.seeds.insert(Atom{top_pred(), {cst(c)}});
    for (auto& r : rules) {
        if (r.body.empty())
            out.seeds.insert(r.head.at(0));
        else
            out.rules.push_back(std::move(r));
    }
    return out;
}

// The semi-naive fixpoint over prepared rules and seed facts.
inline EvalResult semi_naive(const std::vector<Rule>& prepared_rules, std::set<Atom> seeds) {
    EvalResult out;
    for (const auto& s : seeds)
        if (s.pred.builtin == Builtin::Bot) {
            out.unsat = true;
            return out;
        }
    out.facts = std::move(seeds);
    std::set<Atom> delta = out.facts;
    while (!delta.empty()) {
        auto full_ix = index_facts(out.facts);
        auto delta_ix = index_facts(delta);
        std::set<Atom> fresh;
        bool hit_bot = false;
        for (const auto& r : prepared_rules) {
            for (std::size_t i = 0; i < r.body.size() && !hit_bot; ++i) {
                eval_rule_join(r, i, full_ix, delta_ix, [&](Atom a) {
                    if (a.pred.builtin == Builtin::Bot) hit_bot = true;
                    if (!hit_bot && !out.facts.count(a)) fresh.insert(std::move(a));
                });
            }
            if (hit_bot) break;
        }
        if (hit_bot) {
            out.unsat = true;
            out.facts.clear();
            return out;
        }
        for (const auto& a : fresh) out.facts.insert(a);
        delta = std::move(fresh);
    }
    return out;
}

}  // namespace detail

// Semi-naive evaluation: returns all entailed facts (including the dataset
// and the top closure), or unsat when bot fires.
inline EvalResult evaluate(const Program& p, const Dataset& d) {
    auto prep = detail::prepare(p, d);
    return detail::semi_naive(prep.rules, std::move(prep.seeds));
}

// Amortises the program-level preparation (top augmentation, equality
// axioms, rule splitting) across many datasets over the same program.
// Falls back to the one-shot path when a dataset drags eq congruence over
// predicates the program alone does not mention.
class Evaluator {
  public:
    explicit Evaluator(const Program& p) : program_(p) {
        if (!p.is_datalog()) throw NotDatalogError("the evaluator requires a datalog program");
        Program full = augment_top(p);
        sig_ = signature_of(full);
        has_eq_ = sig_.predicates.count("eq") > 0;
        std::vector<Rule> rules = full.rules;
        if (has_eq_)
            for (auto& r : equality_axioms(sig_)) rules.push_back(std::move(r));
        for (auto& r : rules) {
            if (r.body.empty())
                seeds_.insert(r.head.at(0));
            else
                rules_.push_back(std::move(r));
        }
    }

    EvalResult operator()(const Dataset& d) const {
        bool dataset_eq = false, new_pred = false;
        for (const auto& f : d.facts) {
            if (f.pred.builtin == Builtin::Eq) dataset_eq = true;
            if (!sig_.predicates.count(f.pred.name)) new_pred = true;
        }
        if ((has_eq_ && new_pred) || dataset_eq) {
            auto prep = detail::prepare(program_, d);
            return detail::semi_naive(prep.rules, std::move(prep.seeds));
        }
        std::set<Atom> seeds = seeds_;
        for (const auto& f : d.facts) {
            seeds.insert(f);
            for (const auto& t : f.args)
                if (!t.is_var()) seeds.insert(Atom{top_pred(), {t}});
        }
        for (const auto& c : sig_.constants) seeds.insert(Atom{top_pred(), {cst(c)}});
        return detail::semi_naive(rules_, std::move(seeds));
    }

  private:
    Program program_;
    Signature sig_;
    bool has_eq_ = false;
    std::vector<Rule> rules_;
    std::set<Atom> seeds_;
};

// Naive reference evaluation: re-joins every rule over the full fact set
// until nothing changes.
inline EvalResult evaluate_naive(const Program& p, const Dataset& d) {
    auto prep = detail::prepare(p, d);
    EvalResult out;
    out.facts = prep.seeds;
    for (;;) {
        for (const auto& s : out.facts)
            if (s.pred.builtin == Builtin::Bot) {
                out.unsat = true;
                out.facts.clear();
                return out;
            }
        auto full_ix = detail::index_facts(out.facts);
        std::set<Atom> next = out.facts;
        for (const auto& r : prep.rules)
            detail::eval_rule_join(r, detail::kNoDelta, full_ix, full_ix,
                                   [&](Atom a) { next.insert(std::move(a)); });
        if (next == out.facts) return out;
        out.facts = std::move(next);
    }
}

// Certain-answer check for a single ground atom.
inline bool entails(const Program& p, const Dataset& d, const Atom& goal) {
    if (!goal.ground()) throw ValidationError("entailment goals must be ground");
    return evaluate(p, d).holds(goal);
}

}  // namespace wldlog
