#pragma once

// Resolution-based unfolding: most general unifiers, the elementary
// unfolding of one rule against another, the saturating Unfold step over a
// selected body atom, and the driver that iterates unfolding until the
// program becomes weakly linear (then hands over to xi_prime).

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "ast.hpp"
#include "print.hpp"
#include "xi.hpp"

namespace wldlog {

struct NotUnifiableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnfoldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Substitutions and unification (function-free terms)

struct Substitution {
    std::map<std::string, Term> map;  // variable name -> term

    Term apply(Term t) const {
        while (t.is_var()) {
            auto it = map.find(t.name);
            if (it == map.end() || it->second == t) break;
            t = it->second;
        }
        return t;
    }
    Atom apply(Atom a) const {
        for (auto& t : a.args) t = apply(t);
        return a;
    }
    Rule apply(Rule r) const {
        for (auto& a : r.body) a = apply(a);
        for (auto& a : r.head) a = apply(a);
        return r;
    }
};

// Most general unifier of two atoms, or nullopt. The result is idempotent.
inline std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
    if (!(a.pred == b.pred)) return std::nullopt;
    Substitution s;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        Term x = s.apply(a.args[i]);
        Term y = s.apply(b.args[i]);
        if (x == y) continue;
        if (x.is_var())
            s.map[x.name] = y;
        else if (y.is_var())
            s.map[y.name] = x;
        else
            return std::nullopt;  // distinct constants
    }
    for (auto& [v, t] : s.map) t = s.apply(t);
    return s;
}

// ---------------------------------------------------------------------------
// Elementary unfolding

struct ElemUnfoldResult {
    Rule resolvent;  // not canonicalised; atom order preserved
    Substitution theta;
    // for each head index of s: index of its image in resolvent.head, or -1
    // for the resolved-upon atom
    std::vector<int> s_head_image;
};

// Resolves body atom alpha_idx of r against head atom beta_idx of s. s is
// standardised apart first; bodies and heads combine as sets.
inline ElemUnfoldResult elem_unfold(const Rule& r, std::size_t alpha_idx, const Rule& s,
                                    std::size_t beta_idx) {
    if (alpha_idx >= r.body.size()) throw UnfoldError("body atom index out of range");
    if (beta_idx >= s.head.size()) throw UnfoldError("head atom index out of range");

    std::set<std::string> r_vars = r.body_vars();
    for (const auto& v : r.head_vars()) r_vars.insert(v);

    Substitution rename;
    std::set<std::string> s_vars = s.body_vars();
    for (const auto& v : s.head_vars()) s_vars.insert(v);
    int counter = 0;
    for (const auto& v : s_vars) {
        if (!r_vars.count(v)) continue;
        std::string fresh;
        do {
            fresh = v + "_" + std::to_string(counter++);
        } while (r_vars.count(fresh) || s_vars.count(fresh));
        rename.map[v] = var(fresh);
    }
    Rule sr = rename.apply(s);

    auto theta = mgu(r.body[alpha_idx], sr.head[beta_idx]);
    if (!theta) throw NotUnifiableError("selected atoms do not unify");

    ElemUnfoldResult out;
    out.theta = *theta;

    auto push_unique = [&](std::vector<Atom>& dst, Atom a) -> int {
        for (std::size_t i = 0; i < dst.size(); ++i)
            if (dst[i] == a) return static_cast<int>(i);
        dst.push_back(std::move(a));
        return static_cast<int>(dst.size() - 1);
    };
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (i == alpha_idx) continue;
        push_unique(out.resolvent.body, theta->apply(r.body[i]));
    }
    for (const auto& a : sr.body) push_unique(out.resolvent.body, theta->apply(a));
    for (const auto& a : r.head) push_unique(out.resolvent.head, theta->apply(a));
    out.s_head_image.assign(sr.head.size(), -1);
    for (std::size_t i = 0; i < sr.head.size(); ++i) {
        if (i == beta_idx) continue;
        out.s_head_image[i] = push_unique(out.resolvent.head, theta->apply(sr.head[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Unfold: saturate over one body atom

struct UnfoldResult {
    Program program;       // (p without r) plus all resolvents, top-augmented
    std::vector<Rule> resolvents;  // canonical, as added (duplicates omitted)
};

inline UnfoldResult unfold(const Program& p, RuleId rule_id, std::size_t alpha_idx) {
    const Rule* r = p.find_rule(rule_id);
    if (!r) throw UnfoldError("no rule with id " + std::to_string(rule_id));
    if (alpha_idx >= r->body.size())
        throw UnfoldError("rule " + std::to_string(rule_id) + " has no body atom #" +
                          std::to_string(alpha_idx));
    const Atom& alpha = r->body[alpha_idx];
    if (!idb_predicates(p).count(alpha.pred))
        throw UnfoldError("selected atom is not over an IDB predicate: " + print_atom(alpha));

    struct Pair {
        Rule s;
        std::vector<std::size_t> cands;  // head atom indices still to resolve on
    };
    std::deque<Pair> work;
    for (const auto& s : p.rules) {
        if (s.top_rule) continue;
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < s.head.size(); ++i)
            if (s.head[i].pred == alpha.pred) cands.push_back(i);
        if (!cands.empty()) work.push_back({s, std::move(cands)});
    }

    std::vector<Rule> resolvents;
    while (!work.empty()) {
        Pair cur = std::move(work.front());
        work.pop_front();
        for (std::size_t k = 0; k < cur.cands.size(); ++k) {
            ElemUnfoldResult er;
            try {
                er = elem_unfold(*r, alpha_idx, cur.s, cur.cands[k]);
            } catch (const NotUnifiableError&) {
                continue;
            }
            resolvents.push_back(er.resolvent);
            std::vector<std::size_t> next;
            for (std::size_t j = 0; j < cur.cands.size(); ++j) {
                if (j == k) continue;
                int img = er.s_head_image[cur.cands[j]];
                if (img < 0) continue;
                auto idx = static_cast<std::size_t>(img);
                if (er.resolvent.head[idx].pred == alpha.pred &&
                    std::find(next.begin(), next.end(), idx) == next.end())
                    next.push_back(idx);
            }
            if (!next.empty()) work.push_back({er.resolvent, std::move(next)});
        }
    }

    UnfoldResult out;
    out.program.provenance = Provenance::Derived;
    for (const auto& s : p.rules)
        if (s.id != rule_id) out.program.rules.push_back(s);
    out.program.next_id = p.next_id;
    auto is_dup = [&](const Rule& cand) {
        for (const auto& existing : out.program.rules)
            if (!existing.top_rule && canonical_key(existing) == canonical_key(cand)) return true;
        return false;
    };
    for (auto& res : resolvents) {
        Rule canon = canonical_rule(res);
        if (is_dup(canon)) continue;
        canon.id = out.program.fresh_id();
        out.resolvents.push_back(canon);
        out.program.rules.push_back(std::move(canon));
    }
    out.program = augment_top(out.program);
    return out;
}

inline UnfoldResult unfold(const Program& p, RuleId rule_id, const Atom& alpha) {
    const Rule* r = p.find_rule(rule_id);
    if (!r) throw UnfoldError("no rule with id " + std::to_string(rule_id));
    for (std::size_t i = 0; i < r->body.size(); ++i)
        if (r->body[i] == alpha) return unfold(p, rule_id, i);
    throw UnfoldError("atom " + print_atom(alpha) + " does not occur in the body of rule " +
                      std::to_string(rule_id));
}

// ---------------------------------------------------------------------------
// The linearisation driver

struct RewriteConfig {
    std::size_t max_steps = 1000;
    std::size_t max_rules_factor = 10;  // cap: factor * initial non-top rule count
};

enum class RewriteOutcome { Success, StepLimit, RuleLimit };

inline const char* to_string(RewriteOutcome o) {
    switch (o) {
        case RewriteOutcome::Success: return "success";
        case RewriteOutcome::StepLimit: return "step-limit";
        case RewriteOutcome::RuleLimit: return "rule-limit";
    }
    return "?";
}

struct RewriteStep {
    RuleId rule;
    std::string rule_text;
    std::string atom_text;
    std::size_t resolvents;  // rules actually added (after duplicate removal)
};

struct RewriteTrace {
    std::vector<RewriteStep> steps;
    RewriteOutcome outcome = RewriteOutcome::Success;
};

struct LineariseResult {
    bool success = false;
    RewriteOutput rewriting;   // xi_prime of the unfolded program, on success
    Program intermediate;      // the weakly linear disjunctive program (or last state)
    Renaming theta;            // the IDB-expansion renaming
    RewriteTrace trace;
};

// Starting from the IDB expansion of p, repeatedly unfolds the first rule
// with more than one disjunctive body atom (atom choice: fewest defining
// rules, ties by position) until the program is weakly linear, then applies
// xi_prime. Gives up at the step or rule-count cap.
inline LineariseResult rewrite(const Program& p, const RewriteConfig& cfg = {}) {
    LineariseResult out;
    auto [pe, theta] = idb_expansion(p);
    out.theta = std::move(theta);
    Program cur = augment_top(pe);

    auto non_top_count = [](const Program& q) {
        std::size_t n = 0;
        for (const auto& r : q.rules)
            if (!r.top_rule) ++n;
        return n;
    };
    const std::size_t rule_cap = cfg.max_rules_factor * std::max<std::size_t>(1, non_top_count(cur));

    for (;;) {
        auto cls = classify_predicates(cur);
        const Rule* offender = nullptr;
        std::vector<std::size_t> disj_atoms;
        for (const auto& r : cur.rules) {
            if (r.top_rule) continue;
            std::vector<std::size_t> da;
            for (std::size_t i = 0; i < r.body.size(); ++i)
                if (cls.is_disjunctive(r.body[i].pred.name)) da.push_back(i);
            if (da.size() > 1) {
                offender = &r;
                disj_atoms = std::move(da);
                break;
            }
        }
        if (!offender) {
            out.intermediate = cur;
            out.rewriting = xi_prime(cur);
            out.success = true;
            out.trace.outcome = RewriteOutcome::Success;
            return out;
        }
        if (out.trace.steps.size() >= cfg.max_steps) {
            out.intermediate = cur;
            out.trace.outcome = RewriteOutcome::StepLimit;
            return out;
        }

        auto defining = [&](const Predicate& q) {
            std::size_t n = 0;
            for (const auto& r : cur.rules) {
                if (r.top_rule) continue;
                for (const auto& h : r.head)
                    if (h.pred == q) {
                        ++n;
                        break;
                    }
            }
            return n;
        };
        std::size_t best = disj_atoms[0];
        std::size_t best_count = defining(offender->body[best].pred);
        for (std::size_t i = 1; i < disj_atoms.size(); ++i) {
            std::size_t c = defining(offender->body[disj_atoms[i]].pred);
            if (c < best_count) {
                best = disj_atoms[i];
                best_count = c;
            }
        }

        RewriteStep step{offender->id, print_rule(*offender), print_atom(offender->body[best]), 0};
        auto res = unfold(cur, offender->id, best);
        step.resolvents = res.resolvents.size();
        out.trace.steps.push_back(std::move(step));
        cur = std::move(res.program);

        if (non_top_count(cur) > rule_cap) {
            out.intermediate = cur;
            out.trace.outcome = RewriteOutcome::RuleLimit;
            return out;
        }
    }
}

}  // namespace wldlog
