#pragma once

// Ground-and-check oracle for arbitrary disjunctive programs: grounding
// over the active domain, a small complete DPLL search, cautious entailment
// by candidate pruning, and disjunctive entailment queries. Deliberately
// simple and desk-scale; it is the reference the fast paths are checked
// against, so clarity beats speed.

#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "engine.hpp"
#include "print.hpp"

namespace wldlog {

struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleLimits {
    std::size_t max_atoms = 5000;
    std::size_t max_clauses = 200000;
};

// ---------------------------------------------------------------------------
// Ground clause sets

struct GroundClauseSet {
    std::vector<Atom> atoms;  // the indexed universe
    std::map<Atom, int> ids;
    // clauses as (negated atom ids, positive atom ids); a ground rule
    // b1,...,bn -> h1 | ... | hm becomes ({b...}, {h...})
    std::vector<std::pair<std::vector<int>, std::vector<int>>> clauses;

    int intern(const Atom& a, const OracleLimits& lim) {
        auto it = ids.find(a);
        if (it != ids.end()) return it->second;
        if (atoms.size() >= lim.max_atoms)
            throw ResourceCapError("ground atom universe exceeds " +
                                   std::to_string(lim.max_atoms));
        int id = static_cast<int>(atoms.size());
        atoms.push_back(a);
        ids.emplace(a, id);
        return id;
    }
    int find(const Atom& a) const {
        auto it = ids.find(a);
        return it == ids.end() ? -1 : it->second;
    }
};

namespace detail {

// All instances of the non-top rules of p (plus equality congruence when eq
// occurs in sig) over the given constants, appended to gcs. Tautologies
// dropped.
inline void ground_rules(const Program& p, const Signature& sig,
                         const std::set<std::string>& constants, GroundClauseSet& gcs,
                         const OracleLimits& lim) {
    std::vector<Rule> rules;
    for (const auto& r : p.rules)
        if (!r.top_rule) rules.push_back(r);
    if (sig.predicates.count("eq"))
        for (auto& r : equality_axioms(sig)) rules.push_back(std::move(r));

    std::vector<std::string> pool(constants.begin(), constants.end());
    for (const auto& r : rules) {
        std::vector<std::string> vars;
        {
            auto bv = r.body_vars();
            vars.assign(bv.begin(), bv.end());
        }
        if (!vars.empty() && pool.empty()) continue;  // no instances over an empty domain

        std::vector<std::size_t> odo(vars.size(), 0);
        for (;;) {
            std::map<std::string, Term> env;
            for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = cst(pool[odo[i]]);
            auto inst = [&](const Atom& a) {
                Atom g = a;
                for (auto& t : g.args)
                    if (t.is_var()) t = env.at(t.name);
                return g;
            };
            std::vector<int> neg, pos;
            for (const auto& a : r.body) neg.push_back(gcs.intern(inst(a), lim));
            for (const auto& a : r.head) pos.push_back(gcs.intern(inst(a), lim));
            sort_unique(neg);
            sort_unique(pos);
            bool taut = false;
            for (int n : neg)
                if (std::binary_search(pos.begin(), pos.end(), n)) taut = true;
            if (!taut) {
                if (gcs.clauses.size() >= lim.max_clauses)
                    throw ResourceCapError("ground clause count exceeds " +
                                           std::to_string(lim.max_clauses));
                gcs.clauses.emplace_back(std::move(neg), std::move(pos));
            }
            // advance the odometer; empty -> single instance
            std::size_t k = 0;
            while (k < odo.size() && ++odo[k] == pool.size()) odo[k++] = 0;
            if (k == odo.size()) break;
        }
    }
}

}  // namespace detail

// Grounding of p w.r.t. d: all rule instances over the active domain, the
// top facts for every active constant, the dataset facts as unit clauses,
// and the clause (not bot) for the implicit bot rule.
inline GroundClauseSet ground(const Program& p, const Dataset& d, const OracleLimits& lim = {}) {
    GroundClauseSet gcs;
    auto constants = constants_of(p, d);
    detail::ground_rules(p, signature_of(p, d), constants, gcs, lim);
    for (const auto& c : constants)
        gcs.clauses.push_back({{}, {gcs.intern(Atom{top_pred(), {cst(c)}}, lim)}});
    for (const auto& f : d.facts) gcs.clauses.push_back({{}, {gcs.intern(f, lim)}});
    gcs.clauses.push_back({{gcs.intern(Atom{bot_pred(), {}}, lim)}, {}});
    if (gcs.clauses.size() > lim.max_clauses)
        throw ResourceCapError("ground clause count exceeds " + std::to_string(lim.max_clauses));
    return gcs;
}

// ---------------------------------------------------------------------------
// DPLL

// Complete propositional search: unit propagation with per-clause counters,
// chronological backtracking, no learning. Literals are +-(var+1).
class SatSolver {
   public:
    explicit SatSolver(int nvars) : nvars_(nvars), occ_pos_(nvars), occ_neg_(nvars) {}

    void add_clause(std::vector<int> lits) {
        detail::sort_unique(lits);
        for (int l : lits)
            if (std::binary_search(lits.begin(), lits.end(), -l)) return;  // tautology
        if (lits.empty()) {
            always_unsat_ = true;
            return;
        }
        int ci = static_cast<int>(clauses_.size());
        for (int l : lits) (l > 0 ? occ_pos_ : occ_neg_)[std::abs(l) - 1].push_back(ci);
        clauses_.push_back(std::move(lits));
    }

    // model (when requested) maps var -> true/false; unassigned vars read false
    bool solve(const std::vector<int>& assumptions, std::vector<bool>* model = nullptr) {
        if (always_unsat_) return false;
        val_.assign(nvars_, 0);
        trail_.clear();
        n_sat_.assign(clauses_.size(), 0);
        n_free_.assign(clauses_.size(), 0);
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            n_free_[i] = static_cast<int>(clauses_[i].size());

        std::deque<int> q(assumptions.begin(), assumptions.end());
        bool sat = dpll(q);
        if (sat && model) {
            model->assign(nvars_, false);
            for (int v = 0; v < nvars_; ++v) (*model)[v] = val_[v] > 0;
        }
        return sat;
    }

   private:
    int nvars_;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<int>> occ_pos_, occ_neg_;
    bool always_unsat_ = false;

    std::vector<signed char> val_;
    std::vector<int> trail_;
    std::vector<int> n_sat_, n_free_;

    bool propagate(std::deque<int>& q) {
        while (!q.empty()) {
            int lit = q.front();
            q.pop_front();
            int v = std::abs(lit) - 1;
            signed char s = lit > 0 ? 1 : -1;
            if (val_[v]) {
                if (val_[v] != s) return false;
                continue;
            }
            val_[v] = s;
            trail_.push_back(v);
            for (int ci : (s > 0 ? occ_pos_ : occ_neg_)[v]) ++n_sat_[ci];
            bool conflict = false;
            for (int ci : (s > 0 ? occ_neg_ : occ_pos_)[v]) {
                --n_free_[ci];
                if (n_sat_[ci] > 0) continue;
                if (n_free_[ci] == 0) conflict = true;
                else if (n_free_[ci] == 1) {
                    for (int l : clauses_[ci])
                        if (val_[std::abs(l) - 1] == 0) {
                            q.push_back(l);
                            break;
                        }
                }
            }
            if (conflict) return false;
        }
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            int v = trail_.back();
            trail_.pop_back();
            signed char s = val_[v];
            for (int ci : (s > 0 ? occ_pos_ : occ_neg_)[v]) --n_sat_[ci];
            for (int ci : (s > 0 ? occ_neg_ : occ_pos_)[v]) ++n_free_[ci];
            val_[v] = 0;
        }
    }

    bool dpll(std::deque<int>& q) {
        std::size_t mark = trail_.size();
        if (!propagate(q)) {
            undo(mark);
            return false;
        }
        int pick = -1;
        for (int v = 0; v < nvars_; ++v)
            if (val_[v] == 0) {
                pick = v;
                break;
            }
        if (pick < 0) return true;
        // try false first: minimal models first, which speeds up the
        // cautious-candidate pruning above
        for (int s : {-1, +1}) {
            std::deque<int> branch{s * (pick + 1)};
            if (dpll(branch)) return true;
        }
        undo(mark);
        return false;
    }
};

// ---------------------------------------------------------------------------
// The oracle proper

// Grounds the rules of a program once over a fixed constant pool; datasets
// over that pool are then evaluated by toggling fact and top units (passed
// to the solver as assumptions). Sound because inactive-constant atoms are
// never derivable: every rule instance touching one has a body atom over it.
class GroundOracle {
   public:
    // sig defaults to the program's own signature; pass signature_of(p, d)
    // when datasets may mention predicates the program does not
    GroundOracle(const Program& p, const std::set<std::string>& constant_pool,
                 OracleLimits lim = {}, std::optional<Signature> sig = std::nullopt)
        : lim_(lim), pool_(constant_pool), prog_constants_(constants_of(p)) {
        for (const auto& c : prog_constants_) pool_.insert(c);
        Signature signature = sig ? std::move(*sig) : signature_of(p);
        detail::ground_rules(p, signature, pool_, gcs_, lim_);
        bot_ = gcs_.intern(Atom{bot_pred(), {}}, lim_);
        gcs_.clauses.push_back({{bot_}, {}});
        // intern the full atom universe: it doubles as the candidate set
        std::vector<std::string> cs(pool_.begin(), pool_.end());
        for (const auto& [name, pred] : signature.predicates) {
            if (pred.builtin == Builtin::Bot) continue;
            std::vector<std::size_t> odo(static_cast<std::size_t>(pred.arity), 0);
            if (pred.arity > 0 && cs.empty()) continue;
            for (;;) {
                std::vector<Term> args;
                for (std::size_t i = 0; i < odo.size(); ++i) args.push_back(cst(cs[odo[i]]));
                gcs_.intern(Atom{pred, std::move(args)}, lim_);
                std::size_t k = 0;
                while (k < odo.size() && ++odo[k] == cs.size()) odo[k++] = 0;
                if (k == odo.size()) break;
            }
        }
        for (const auto& c : cs) gcs_.intern(Atom{top_pred(), {cst(c)}}, lim_);
        solver_.emplace(static_cast<int>(gcs_.atoms.size()));
        for (const auto& [neg, pos] : gcs_.clauses) {
            std::vector<int> lits;
            for (int n : neg) lits.push_back(-(n + 1));
            for (int pid : pos) lits.push_back(pid + 1);
            solver_->add_clause(std::move(lits));
        }
    }

    const GroundClauseSet& clause_set() const { return gcs_; }

    bool satisfiable(const Dataset& d) { return solver_->solve(assumptions(d)); }

    // true iff the clause set with all disjuncts negated is unsatisfiable;
    // atoms outside the ground universe cannot be entailed and are dropped
    bool entails(const Dataset& d, const std::vector<Atom>& disjunction) {
        std::vector<int> as = assumptions(d);
        for (const auto& a : disjunction) {
            int id = a.pred.builtin == Builtin::Bot ? bot_ : gcs_.find(a);
            if (id >= 0) as.push_back(-(id + 1));
        }
        return !solver_->solve(as);
    }

    // cautious entailment by candidate pruning: every counterexample model
    // found shrinks the candidate set, every failed refutation confirms one
    EvalResult cautious(const Dataset& d, const std::set<std::string>* pred_filter = nullptr) {
        EvalResult out;
        std::vector<int> base = assumptions(d);
        std::vector<bool> model;
        if (!solver_->solve(base, &model)) {
            out.unsat = true;
            return out;
        }
        std::set<std::string> active = active_constants(d);
        std::vector<int> cands;
        for (std::size_t i = 0; i < gcs_.atoms.size(); ++i) {
            if (!model[i]) continue;
            const Atom& a = gcs_.atoms[i];
            if (pred_filter && !pred_filter->count(a.pred.name)) continue;
            bool ok = true;
            for (const auto& t : a.args)
                if (!active.count(t.name)) ok = false;
            if (ok) cands.push_back(static_cast<int>(i));
        }
        std::vector<bool> confirmed(gcs_.atoms.size(), false);
        std::size_t i = 0;
        while (i < cands.size()) {
            int id = cands[i];
            if (confirmed[static_cast<std::size_t>(id)]) {
                ++i;
                continue;
            }
            std::vector<int> as = base;
            as.push_back(-(id + 1));
            if (solver_->solve(as, &model)) {
                std::vector<int> kept;
                for (int c : cands)
                    if (model[static_cast<std::size_t>(c)]) kept.push_back(c);
                cands = std::move(kept);
                // id itself is gone; do not advance past surviving entries
                i = 0;
            } else {
                confirmed[static_cast<std::size_t>(id)] = true;
                ++i;
            }
        }
        for (int c : cands) out.facts.insert(gcs_.atoms[static_cast<std::size_t>(c)]);
        return out;
    }

   private:
    OracleLimits lim_;
    std::set<std::string> pool_;
    std::set<std::string> prog_constants_;
    GroundClauseSet gcs_;
    int bot_ = -1;
    std::optional<SatSolver> solver_;

    // active domain of (p, d): the program constants plus those of d
    std::set<std::string> active_constants(const Dataset& d) const {
        std::set<std::string> cs = prog_constants_;
        for (const auto& f : d.facts)
            for (const auto& t : f.args)
                if (!t.is_var()) cs.insert(t.name);
        return cs;
    }

    std::vector<int> assumptions(const Dataset& d) {
        std::vector<int> as;
        for (const auto& f : d.facts) {
            int id = gcs_.find(f);
            if (id < 0)
                throw ValidationError("dataset fact outside the oracle universe: " + print_atom(f));
            as.push_back(id + 1);
        }
        for (const auto& c : active_constants(d)) {
            int id = gcs_.find(Atom{top_pred(), {cst(c)}});
            if (id >= 0) as.push_back(id + 1);
        }
        return as;
    }
};

// One-shot conveniences over the active domain of (p, d).

inline EvalResult cautious_eval(const Program& p, const Dataset& d, const OracleLimits& lim = {}) {
    GroundOracle o(p, constants_of(p, d), lim, signature_of(p, d));
    return o.cautious(d);
}

inline bool entails_oracle(const Program& p, const Dataset& d, const std::vector<Atom>& disjunction,
                           const OracleLimits& lim = {}) {
    GroundOracle o(p, constants_of(p, d), lim, signature_of(p, d));
    return o.entails(d, disjunction);
}

inline bool entails_oracle(const Program& p, const Dataset& d, const Atom& goal,
                           const OracleLimits& lim = {}) {
    return entails_oracle(p, d, std::vector<Atom>{goal}, lim);
}

}  // namespace wldlog
