#pragma once

// The datalog rewritings: xi (linear input) and xi_prime (weakly linear
// input), plus per-goal pruning of the output.
//
// Both share one core. Sigma is the set of restricted predicates (IDB for
// xi, disjunctive for xi_prime); chi collects the remaining body atoms (EDB
// for xi, all datalog atoms for xi_prime). Rules are flipped over fresh
// auxiliary predicates P^R with arity(P^R) = arity(P) + arity(R).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "ast.hpp"

namespace wldlog {

struct NotLinearError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotWLError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AuxPredicate {
    Predicate base;
    Predicate goal;

    Predicate pred() const {
        return Predicate{base.name + "^" + goal.name, base.arity + goal.arity, Builtin::None};
    }
};

enum class XiCase { Init, FlipBody, FlipFree, Collect, BotFlip, Verbatim };

inline const char* to_string(XiCase c) {
    switch (c) {
        case XiCase::Init: return "init";
        case XiCase::FlipBody: return "flip-body";
        case XiCase::FlipFree: return "flip-free";
        case XiCase::Collect: return "collect";
        case XiCase::BotFlip: return "bot-flip";
        case XiCase::Verbatim: return "verbatim";
    }
    return "?";
}

struct RuleProvenance {
    RuleId source = -1;  // -1 for rules with no single source (init/collect)
    XiCase kind = XiCase::Verbatim;
    std::string goal;  // goal predicate R, empty for verbatim
};

struct RewriteOutput {
    Program program;
    std::set<Predicate> sigma;
    std::map<std::string, AuxPredicate> aux;  // by auxiliary predicate name
    std::map<RuleId, RuleProvenance> provenance;
    std::set<std::string> source_predicates;
};

namespace detail {

inline std::vector<Term> goal_vars(const Predicate& r) {
    std::vector<Term> ys;
    for (int i = 0; i < r.arity; ++i) ys.push_back(var("Y" + std::to_string(i)));
    return ys;
}

inline Atom aux_atom(RewriteOutput& out, const Predicate& base, const std::vector<Term>& args,
                     const Predicate& goal, const std::vector<Term>& ys) {
    AuxPredicate ap{base, goal};
    Predicate p = ap.pred();
    out.aux.emplace(p.name, ap);
    std::vector<Term> all = args;
    all.insert(all.end(), ys.begin(), ys.end());
    return Atom{p, std::move(all)};
}

// Least conjunction of top-atoms making the rule safe: one top(v) per head
// variable not occurring in the body, in order of appearance in the head.
inline void add_top_padding(Rule& r) {
    auto bv = r.body_vars();
    std::set<std::string> added;
    for (const auto& h : r.head)
        for (const auto& t : h.args)
            if (t.is_var() && !bv.count(t.name) && added.insert(t.name).second)
                r.body.push_back(Atom{top_pred(), {t}});
}

inline RewriteOutput xi_core(const Program& p, const std::set<Predicate>& sigma) {
    RewriteOutput out;
    out.sigma = sigma;
    out.program.provenance = Provenance::Derived;
    for (const auto& [name, pred] : signature_of(p).predicates)
        out.source_predicates.insert(name);

    auto in_sigma = [&](const Predicate& q) { return sigma.count(q) > 0; };
    auto emit = [&](Rule r, RuleProvenance prov) {
        r = canonical_rule(r);
        r.id = out.program.fresh_id();
        for (const auto& existing : out.program.rules)
            if (canonical_key(existing) == canonical_key(r)) return;  // exact duplicate
        out.provenance[r.id] = std::move(prov);
        out.program.rules.push_back(std::move(r));
    };

    // (1) initialisation: chi_top -> R^R(y, y)
    for (const auto& R : sigma) {
        auto ys = goal_vars(R);
        Rule r;
        std::vector<Term> args = ys;
        r.head.push_back(aux_atom(out, R, args, R, ys));
        add_top_padding(r);
        emit(std::move(r), {-1, XiCase::Init, R.name});
    }

    // per-rule flips
    for (const auto& rule : p.rules) {
        if (rule.top_rule) continue;
        std::vector<Atom> chi, sigma_body;
        for (const auto& a : rule.body)
            (in_sigma(a.pred) ? sigma_body : chi).push_back(a);
        bool head_sigma = false;
        for (const auto& a : rule.head) {
            if (in_sigma(a.pred)) head_sigma = true;
        }
        if (sigma_body.empty() && !head_sigma) {
            Rule copy = rule;
            emit(std::move(copy), {rule.id, XiCase::Verbatim, ""});
            continue;
        }
        if (sigma_body.size() > 1)
            throw std::logic_error("xi_core: more than one restricted body atom");
        for (const auto& a : rule.head)
            if (!in_sigma(a.pred))
                throw std::logic_error("xi_core: head atom outside sigma in a restricted rule");

        for (const auto& R : sigma) {
            auto ys = goal_vars(R);
            Rule nr;
            nr.body = chi;
            for (const auto& h : rule.head)
                nr.body.push_back(aux_atom(out, h.pred, h.args, R, ys));
            if (sigma_body.size() == 1) {
                // (2) flip the restricted body atom into the head
                const Atom& q = sigma_body[0];
                nr.head.push_back(aux_atom(out, q.pred, q.args, R, ys));
                add_top_padding(nr);
                emit(std::move(nr), {rule.id, XiCase::FlipBody, R.name});
            } else {
                // (3) restricted-free body: derive the goal directly
                nr.head.push_back(Atom{R, ys});
                add_top_padding(nr);
                emit(std::move(nr), {rule.id, XiCase::FlipFree, R.name});
            }
        }
    }

    // flip of the implicit (bot ->) rule when bot is restricted
    if (sigma.count(bot_pred())) {
        for (const auto& R : sigma) {
            auto ys = goal_vars(R);
            Rule nr;
            nr.head.push_back(aux_atom(out, bot_pred(), {}, R, ys));
            add_top_padding(nr);
            emit(std::move(nr), {-1, XiCase::BotFlip, R.name});
        }
    }

    // (4) collection: Q(z), Q^R(z, y) -> R(y)
    for (const auto& Q : sigma) {
        for (const auto& R : sigma) {
            auto ys = goal_vars(R);
            std::vector<Term> zs;
            for (int i = 0; i < Q.arity; ++i) zs.push_back(var("Z" + std::to_string(i)));
            Rule nr;
            nr.body.push_back(Atom{Q, zs});
            nr.body.push_back(aux_atom(out, Q, zs, R, ys));
            nr.head.push_back(Atom{R, ys});
            add_top_padding(nr);
            emit(std::move(nr), {-1, XiCase::Collect, R.name});
        }
    }

    return out;
}

}  // namespace detail

// Rewriting of a linear disjunctive program into datalog. Sigma is the set
// of IDB predicates outside P_top.
inline RewriteOutput xi(const Program& p) {
    auto lin = is_linear(p);
    if (!lin.holds) throw NotLinearError("program is not linear");
    return detail::xi_core(p, idb_predicates(p));
}

// Rewriting of a weakly linear program into datalog. Sigma is the set of
// disjunctive predicates; chi keeps all datalog atoms, and rules without
// disjunctive predicates are copied verbatim.
inline RewriteOutput xi_prime(const Program& p) {
    auto wl = is_wl(p);
    if (!wl.holds) throw NotWLError("program is not weakly linear");
    auto cls = classify_predicates(p);
    std::set<Predicate> sigma;
    for (const auto& q : idb_predicates(p))
        if (cls.is_disjunctive(q.name)) sigma.insert(q);
    return detail::xi_core(p, sigma);
}

// Removes every rule mentioning an auxiliary predicate X^R with R outside
// the goal set; the result is a rewriting w.r.t. that set. Falsum is always
// an implicit goal: inconsistency must be preserved under any restriction,
// so the bot-goal machinery is never pruned.
inline Program prune_for_goals(const RewriteOutput& out, std::set<std::string> goals) {
    for (const auto& g : goals)
        if (!out.source_predicates.count(g))
            throw ValidationError("unknown predicate in goal set: " + g);
    goals.insert(bot_pred().name);
    Program pruned;
    pruned.provenance = Provenance::Derived;
    pruned.next_id = out.program.next_id;
    for (const auto& r : out.program.rules) {
        bool keep = true;
        auto check = [&](const Atom& a) {
            auto it = out.aux.find(a.pred.name);
            if (it != out.aux.end() && !goals.count(it->second.goal.name)) keep = false;
        };
        for (const auto& a : r.body) check(a);
        for (const auto& a : r.head) check(a);
        if (keep) pruned.rules.push_back(r);
    }
    return pruned;
}

}  // namespace wldlog
