#pragma once

// The reverse rewriting: datalog into linear disjunctive datalog, via the
// IDB expansion. For each IDB predicate R of P^e, every rule of P^e is
// flipped wholesale (all atoms change sides) over auxiliary predicates
// P^R, with initialisation and per-EDB-predicate collection rules.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "xi.hpp"

namespace wldlog {

struct PsiOutput {
    Program program;
    Renaming theta;  // the P^e renaming (IDB Q of the input -> Q')
    std::map<std::string, AuxPredicate> aux;
    std::map<RuleId, RuleProvenance> provenance;
};

inline PsiOutput psi(const Program& p) {
    if (!p.is_datalog()) throw NotDatalogError("psi requires a datalog program");
    auto [pe, theta] = idb_expansion(p);

    PsiOutput out;
    out.theta = theta;
    out.program.provenance = Provenance::Derived;

    auto idb = idb_predicates(pe);  // primed predicates, plus bot if it heads a rule
    std::set<Predicate> edb;
    for (const auto& [name, pred] : signature_of(pe).predicates)
        if (!idb.count(pred) && pred.builtin != Builtin::Bot) edb.insert(pred);
    edb.insert(top_pred());

    auto emit = [&](Rule r, RuleProvenance prov) {
        r = canonical_rule(r);
        r.id = out.program.fresh_id();
        for (const auto& existing : out.program.rules)
            if (canonical_key(existing) == canonical_key(r)) return;
        out.provenance[r.id] = std::move(prov);
        out.program.rules.push_back(std::move(r));
    };
    auto aux_atom = [&](const Predicate& base, const std::vector<Term>& args,
                        const Predicate& goal, const std::vector<Term>& ys) {
        AuxPredicate ap{base, goal};
        Predicate pred = ap.pred();
        out.aux.emplace(pred.name, ap);
        std::vector<Term> all = args;
        all.insert(all.end(), ys.begin(), ys.end());
        return Atom{pred, std::move(all)};
    };

    for (const auto& R : idb) {
        std::vector<Term> ys;
        for (int i = 0; i < R.arity; ++i) ys.push_back(var("Y" + std::to_string(i)));

        for (const auto& rule : pe.rules) {
            if (rule.top_rule) continue;
            const Atom& head = rule.head.at(0);
            Rule nr;
            if (head.pred.builtin == Builtin::Bot) {
                // (2) chi_top -> V_i P_i^R(s_i, y)
                for (const auto& b : rule.body) nr.head.push_back(aux_atom(b.pred, b.args, R, ys));
                if (nr.head.empty()) nr.head.push_back(Atom{bot_pred(), {}});
            } else {
                // (1) chi_top, Q^R(t, y) -> V_i P_i^R(s_i, y); empty head reads as bot
                nr.body.push_back(aux_atom(head.pred, head.args, R, ys));
                for (const auto& b : rule.body) nr.head.push_back(aux_atom(b.pred, b.args, R, ys));
                if (nr.head.empty()) nr.head.push_back(Atom{bot_pred(), {}});
            }
            detail::add_top_padding(nr);
            emit(std::move(nr), {rule.id, XiCase::FlipBody, R.name});
        }

        // (3) chi_top -> R^R(y, y)
        {
            Rule nr;
            std::vector<Term> args = ys;
            nr.head.push_back(aux_atom(R, args, R, ys));
            detail::add_top_padding(nr);
            emit(std::move(nr), {-1, XiCase::Init, R.name});
        }

        // (4) Q(z), Q^R(z, y) -> R(y) for every EDB predicate Q of P^e
        for (const auto& Q : edb) {
            std::vector<Term> zs;
            for (int i = 0; i < Q.arity; ++i) zs.push_back(var("Z" + std::to_string(i)));
            Rule nr;
            nr.body.push_back(Atom{Q, zs});
            nr.body.push_back(aux_atom(Q, zs, R, ys));
            nr.head.push_back(Atom{R, ys});
            detail::add_top_padding(nr);
            emit(std::move(nr), {-1, XiCase::Collect, R.name});
        }
    }

    return out;
}

}  // namespace wldlog
