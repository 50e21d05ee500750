#pragma once

// Abstract syntax for disjunctive datalog: terms, atoms, rules, programs,
// datasets, plus the program conventions (top/bot handling, IDB expansion,
// equality axiomatisation).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wldlog {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotDatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Terms

enum class TermKind { Variable, Constant };

struct Term {
    TermKind kind = TermKind::Constant;
    std::string name;

    bool is_var() const { return kind == TermKind::Variable; }
    friend auto operator<=>(const Term&, const Term&) = default;
};

inline Term var(std::string name) { return Term{TermKind::Variable, std::move(name)}; }
inline Term cst(std::string name) { return Term{TermKind::Constant, std::move(name)}; }

// ---------------------------------------------------------------------------
// Predicates

enum class Builtin { None, Top, Bot, Eq };

struct Predicate {
    std::string name;
    int arity = 0;
    Builtin builtin = Builtin::None;

    friend auto operator<=>(const Predicate& a, const Predicate& b) {
        return std::tie(a.name, a.arity) <=> std::tie(b.name, b.arity);
    }
    friend bool operator==(const Predicate& a, const Predicate& b) {
        return a.name == b.name && a.arity == b.arity;
    }
};

inline Predicate top_pred() { return Predicate{"top", 1, Builtin::Top}; }
inline Predicate bot_pred() { return Predicate{"bot", 0, Builtin::Bot}; }
inline Predicate eq_pred() { return Predicate{"eq", 2, Builtin::Eq}; }

// Names produced by the transformations are not expressible in the surface
// grammar: primed predicates carry a trailing apostrophe, auxiliary
// predicates contain a caret (base^goal).
inline bool is_internal_name(const std::string& n) {
    return n.find('\'') != std::string::npos || n.find('^') != std::string::npos;
}
inline bool is_reserved_name(const std::string& n) {
    return n == "top" || n == "bot" || n == "eq";
}

// ---------------------------------------------------------------------------
// Atoms

struct Atom {
    Predicate pred;
    std::vector<Term> args;

    bool ground() const {
        return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var(); });
    }
    friend auto operator<=>(const Atom& a, const Atom& b) {
        return std::tie(a.pred, a.args) <=> std::tie(b.pred, b.args);
    }
    friend bool operator==(const Atom& a, const Atom& b) {
        return a.pred == b.pred && a.args == b.args;
    }
};

inline Atom make_atom(Predicate p, std::vector<Term> args) {
    if (static_cast<int>(args.size()) != p.arity)
        throw ValidationError("arity mismatch for predicate " + p.name);
    return Atom{std::move(p), std::move(args)};
}

// ---------------------------------------------------------------------------
// Rules

using RuleId = int;

struct Rule {
    RuleId id = -1;
    std::vector<Atom> body;  // set semantics, kept sorted and deduplicated
    std::vector<Atom> head;  // likewise
    bool top_rule = false;   // member of the materialised P_top

    bool is_fact() const { return body.empty() && head.size() == 1 && head[0].ground(); }
    bool is_datalog() const { return head.size() <= 1; }
    bool is_disjunctive() const { return head.size() > 1; }

    std::set<std::string> body_vars() const {
        std::set<std::string> vs;
        for (const auto& a : body)
            for (const auto& t : a.args)
                if (t.is_var()) vs.insert(t.name);
        return vs;
    }
    std::set<std::string> head_vars() const {
        std::set<std::string> vs;
        for (const auto& a : head)
            for (const auto& t : a.args)
                if (t.is_var()) vs.insert(t.name);
        return vs;
    }
};

namespace detail {

template <typename T>
inline void sort_unique(std::vector<T>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

// Shape of an atom with variable identity erased; used to order atoms before
// picking a canonical variable naming.
inline std::string atom_shape(const Atom& a) {
    std::string s = a.pred.name;
    s += '/';
    s += std::to_string(a.pred.arity);
    for (const auto& t : a.args) {
        s += t.is_var() ? "|?" : "|c:" + t.name;
    }
    return s;
}

inline std::string render_order(const Rule& r, const std::vector<int>& body_ord,
                                const std::vector<int>& head_ord,
                                std::unordered_map<std::string, std::string>* naming_out) {
    std::unordered_map<std::string, std::string> naming;
    int next = 0;
    auto term_key = [&](const Term& t) -> std::string {
        if (!t.is_var()) return "c:" + t.name;
        auto it = naming.find(t.name);
        if (it == naming.end())
            it = naming.emplace(t.name, "V" + std::to_string(next++)).first;
        return "v:" + it->second;
    };
    std::string s;
    auto add = [&](const Atom& a) {
        s += a.pred.name;
        for (const auto& t : a.args) {
            s += ',';
            s += term_key(t);
        }
        s += ';';
    };
    for (int i : body_ord) add(r.body[i]);
    s += "=>";
    for (int i : head_ord) add(r.head[i]);
    if (naming_out) *naming_out = std::move(naming);
    return s;
}

// Enumerates orderings of atoms that agree with the shape order, permuting
// only within groups of equal shape. Small groups in practice; capped.
inline bool tie_orders(const std::vector<Atom>& atoms, std::vector<std::vector<int>>& out,
                       std::size_t cap) {
    std::vector<int> idx(atoms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return atom_shape(atoms[a]) < atom_shape(atoms[b]);
    });
    // group boundaries
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= idx.size(); ++i) {
        if (i == idx.size() || atom_shape(atoms[idx[i]]) != atom_shape(atoms[idx[start]])) {
            groups.emplace_back(start, i);
            start = i;
        }
    }
    out.clear();
    out.push_back(idx);
    for (auto [b, e] : groups) {
        if (e - b < 2) continue;
        std::vector<std::vector<int>> next;
        for (auto& ord : out) {
            std::vector<int> group(ord.begin() + b, ord.begin() + e);
            std::sort(group.begin(), group.end());
            do {
                auto cand = ord;
                std::copy(group.begin(), group.end(), cand.begin() + b);
                next.push_back(std::move(cand));
                if (next.size() > cap) return false;
            } while (std::next_permutation(group.begin(), group.end()));
        }
        out = std::move(next);
    }
    return true;
}

}  // namespace detail

// Canonical form of a rule: atoms sorted and deduplicated, variables renamed
// V0, V1, ... by first occurrence under the lexicographically smallest
// admissible atom ordering. Two rules are equal up to variable renaming iff
// their canonical keys coincide.
inline std::string canonical_key(const Rule& r_in) {
    Rule r = r_in;
    detail::sort_unique(r.body);
    detail::sort_unique(r.head);
    std::vector<std::vector<int>> body_orders, head_orders;
    constexpr std::size_t kCap = 5040;
    bool ok = detail::tie_orders(r.body, body_orders, kCap) &&
              detail::tie_orders(r.head, head_orders, kCap) &&
              body_orders.size() * head_orders.size() <= kCap;
    if (!ok) {
        // fall back to the first shape ordering
        std::vector<std::vector<int>> b1, h1;
        detail::tie_orders(r.body, b1, 1);
        detail::tie_orders(r.head, h1, 1);
        return detail::render_order(r, b1[0], h1[0], nullptr);
    }
    std::string best;
    for (const auto& bo : body_orders)
        for (const auto& ho : head_orders) {
            std::string s = detail::render_order(r, bo, ho, nullptr);
            if (best.empty() || s < best) best = std::move(s);
        }
    return best;
}

// Rewrites a rule into its canonical form (the form canonical_key describes).
inline Rule canonical_rule(const Rule& r_in) {
    Rule r = r_in;
    detail::sort_unique(r.body);
    detail::sort_unique(r.head);
    std::vector<std::vector<int>> body_orders, head_orders;
    constexpr std::size_t kCap = 5040;
    bool ok = detail::tie_orders(r.body, body_orders, kCap) &&
              detail::tie_orders(r.head, head_orders, kCap) &&
              body_orders.size() * head_orders.size() <= kCap;
    if (!ok) {
        std::vector<std::vector<int>> b1, h1;
        detail::tie_orders(r.body, b1, 1);
        detail::tie_orders(r.head, h1, 1);
        body_orders = b1;
        head_orders = h1;
    }
    std::string best;
    const std::vector<int>* best_b = nullptr;
    const std::vector<int>* best_h = nullptr;
    for (const auto& bo : body_orders)
        for (const auto& ho : head_orders) {
            std::string s = detail::render_order(r, bo, ho, nullptr);
            if (best.empty() || s < best) {
                best = std::move(s);
                best_b = &bo;
                best_h = &ho;
            }
        }
    std::unordered_map<std::string, std::string> naming;
    detail::render_order(r, *best_b, *best_h, &naming);
    auto rename = [&](Atom a) {
        for (auto& t : a.args)
            if (t.is_var()) t.name = naming.at(t.name);
        return a;
    };
    Rule out;
    out.id = r.id;
    out.top_rule = r.top_rule;
    for (int i : *best_b) out.body.push_back(rename(r.body[i]));
    for (int i : *best_h) out.head.push_back(rename(r.head[i]));
    return out;
}

inline bool rules_equal_upto_renaming(const Rule& a, const Rule& b) {
    return canonical_key(a) == canonical_key(b);
}

// ---------------------------------------------------------------------------
// Programs and datasets

enum class Provenance { Original, Derived };

struct Program {
    std::vector<Rule> rules;
    Provenance provenance = Provenance::Original;
    RuleId next_id = 0;

    RuleId fresh_id() { return next_id++; }
    const Rule* find_rule(RuleId id) const {
        for (const auto& r : rules)
            if (r.id == id) return &r;
        return nullptr;
    }
    bool is_datalog() const {
        return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.is_datalog(); });
    }
};

struct Dataset {
    std::set<Atom> facts;
};

struct Signature {
    std::map<std::string, Predicate> predicates;
    std::set<std::string> constants;

    void add(const Atom& a) {
        auto it = predicates.find(a.pred.name);
        if (it == predicates.end()) {
            predicates.emplace(a.pred.name, a.pred);
        } else if (it->second.arity != a.pred.arity) {
            throw ValidationError("arity mismatch for predicate " + a.pred.name + ": " +
                                  std::to_string(it->second.arity) + " vs " +
                                  std::to_string(a.pred.arity));
        }
        for (const auto& t : a.args)
            if (!t.is_var()) constants.insert(t.name);
    }
};

inline Signature signature_of(const Program& p) {
    Signature sig;
    for (const auto& r : p.rules) {
        for (const auto& a : r.body) sig.add(a);
        for (const auto& a : r.head) sig.add(a);
    }
    return sig;
}

inline Signature signature_of(const Program& p, const Dataset& d) {
    Signature sig = signature_of(p);
    for (const auto& f : d.facts) sig.add(f);
    return sig;
}

// Injective, arity-preserving predicate renaming.
struct Renaming {
    std::map<std::string, Predicate> map;  // source predicate name -> target

    bool empty() const { return map.empty(); }
    Predicate apply(const Predicate& p) const {
        auto it = map.find(p.name);
        return it == map.end() ? p : it->second;
    }
    Atom apply(Atom a) const {
        a.pred = apply(a.pred);
        return a;
    }
    void check_valid() const {
        std::set<std::string> targets;
        for (const auto& [src, tgt] : map) {
            if (!targets.insert(tgt.name).second)
                throw ValidationError("renaming is not injective at " + tgt.name);
        }
    }
};

// ---------------------------------------------------------------------------
// validate_program

// Enforces the rule invariants and standardises variables apart (canonical
// per-rule naming; rules never share variables structurally since variables
// are rule-scoped). `internal` admits derived-name predicates and
// equality-carrying bodies, which the surface grammar rejects for user input.
inline Program validate_program(std::vector<Rule> raw, Provenance prov = Provenance::Original,
                                bool internal = false) {
    Program p;
    p.provenance = prov;
    Signature sig;
    for (auto& r : raw) {
        detail::sort_unique(r.body);
        detail::sort_unique(r.head);
        for (const auto& a : r.body) sig.add(a);
        for (const auto& a : r.head) sig.add(a);
        if (!r.top_rule) {
            if (r.head.empty())
                throw ValidationError("rule has an empty head (the bot rule is implicit)");
            for (const auto& a : r.head)
                if (a.pred.builtin == Builtin::Top)
                    throw ValidationError("top may not occur in the head of a rule");
            for (const auto& a : r.body) {
                if (!internal && a.pred.builtin == Builtin::Bot)
                    throw ValidationError("bot may not occur in the body of a rule");
                if (!internal && a.pred.builtin == Builtin::Eq)
                    throw ValidationError("rule bodies must be equality-free");
            }
            if (!internal) {
                for (const auto& [name, pred] : sig.predicates) {
                    if (pred.builtin == Builtin::None &&
                        (is_internal_name(name) || is_reserved_name(name)))
                        throw ValidationError("predicate name is reserved: " + name);
                }
            }
        }
        auto bv = r.body_vars();
        for (const auto& v : r.head_vars()) {
            if (!bv.count(v))
                throw ValidationError("unsafe rule: head variable " + v +
                                      " does not occur in the body");
        }
        Rule canon = canonical_rule(r);
        canon.id = p.fresh_id();
        p.rules.push_back(std::move(canon));
    }
    return p;
}

inline Dataset validate_dataset(std::vector<Atom> facts) {
    Dataset d;
    for (auto& f : facts) {
        if (!f.ground()) throw ValidationError("dataset facts must be ground");
        if (f.pred.builtin == Builtin::Top || f.pred.builtin == Builtin::Bot)
            throw ValidationError("datasets may not contain top or bot facts");
        d.facts.insert(std::move(f));
    }
    return d;
}

// ---------------------------------------------------------------------------
// P_top

// Returns p extended with the materialised P_top rules, tagged as such.
// Regenerated from scratch from the non-top rules, hence idempotent.
inline Program augment_top(const Program& p) {
    Program out;
    out.provenance = p.provenance;
    Signature sig;
    for (const auto& r : p.rules) {
        if (r.top_rule) continue;
        out.rules.push_back(r);
        for (const auto& a : r.body) sig.add(a);
        for (const auto& a : r.head) sig.add(a);
    }
    std::vector<Rule> generated;
    for (const auto& [name, pred] : sig.predicates) {
        if (pred.builtin == Builtin::Top || pred.builtin == Builtin::Bot) continue;
        for (int i = 0; i < pred.arity; ++i) {
            Rule r;
            r.top_rule = true;
            std::vector<Term> args;
            for (int j = 0; j < pred.arity; ++j) args.push_back(var("V" + std::to_string(j)));
            r.body.push_back(Atom{pred, args});
            r.head.push_back(Atom{top_pred(), {args[static_cast<std::size_t>(i)]}});
            generated.push_back(std::move(r));
        }
    }
    for (const auto& c : sig.constants) {
        Rule r;
        r.top_rule = true;
        r.head.push_back(Atom{top_pred(), {cst(c)}});
        generated.push_back(std::move(r));
    }
    std::sort(generated.begin(), generated.end(),
              [](const Rule& a, const Rule& b) { return canonical_key(a) < canonical_key(b); });
    RuleId id = 0;
    for (const auto& r : out.rules) id = std::max(id, r.id + 1);
    out.next_id = std::max(p.next_id, id);
    for (auto& r : generated) {
        r.id = out.fresh_id();
        out.rules.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// IDB predicates

// Predicates occurring in the head of some rule outside P_top.
inline std::set<Predicate> idb_predicates(const Program& p) {
    std::set<Predicate> idb;
    for (const auto& r : p.rules) {
        if (r.top_rule) continue;
        for (const auto& a : r.head) idb.insert(a.pred);
    }
    return idb;
}

// ---------------------------------------------------------------------------
// IDB expansion

// Renames each (non-builtin) IDB predicate Q to Q' throughout and adds a
// bridging rule Q(x) -> Q'(x); every predicate of p becomes EDB in the
// result. bot keeps its role: rules with head bot are left headed by bot.
inline std::pair<Program, Renaming> idb_expansion(const Program& p) {
    Renaming theta;
    for (const auto& q : idb_predicates(p)) {
        if (q.builtin == Builtin::Bot) continue;
        if (q.builtin == Builtin::Eq)
            throw UnsupportedError("IDB expansion over equality heads is not supported");
        if (q.builtin == Builtin::Top) continue;  // cannot occur; defensive skip
        theta.map[q.name] = Predicate{q.name + "'", q.arity, Builtin::None};
    }
    theta.check_valid();
    Program out;
    out.provenance = Provenance::Derived;
    for (const auto& r : p.rules) {
        Rule nr = r;
        for (auto& a : nr.body) a = theta.apply(std::move(a));
        for (auto& a : nr.head) a = theta.apply(std::move(a));
        nr.id = out.fresh_id();
        out.rules.push_back(canonical_rule(nr));
        out.rules.back().id = nr.id;
    }
    for (const auto& [src, tgt] : theta.map) {
        Predicate orig;
        orig.name = src;
        orig.arity = tgt.arity;
        Rule bridge;
        std::vector<Term> args;
        for (int j = 0; j < tgt.arity; ++j) args.push_back(var("V" + std::to_string(j)));
        bridge.body.push_back(Atom{orig, args});
        bridge.head.push_back(Atom{tgt, args});
        bridge.id = out.fresh_id();
        out.rules.push_back(std::move(bridge));
    }
    return {std::move(out), std::move(theta)};
}

// ---------------------------------------------------------------------------
// Equality axiomatisation

// Congruence rules for eq over the given signature: reflexivity (over top),
// symmetry, transitivity, and one replacement rule per argument position.
// Empty when eq does not occur in the signature.
inline std::vector<Rule> equality_axioms(const Signature& sig) {
    std::vector<Rule> out;
    if (!sig.predicates.count("eq")) return out;
    auto eq = eq_pred();
    {
        Rule r;  // top(x) -> x = x
        r.body.push_back(Atom{top_pred(), {var("V0")}});
        r.head.push_back(Atom{eq, {var("V0"), var("V0")}});
        out.push_back(std::move(r));
    }
    {
        Rule r;  // x = y -> y = x
        r.body.push_back(Atom{eq, {var("V0"), var("V1")}});
        r.head.push_back(Atom{eq, {var("V1"), var("V0")}});
        out.push_back(std::move(r));
    }
    {
        Rule r;  // x = y, y = z -> x = z
        r.body.push_back(Atom{eq, {var("V0"), var("V1")}});
        r.body.push_back(Atom{eq, {var("V1"), var("V2")}});
        r.head.push_back(Atom{eq, {var("V0"), var("V2")}});
        out.push_back(std::move(r));
    }
    for (const auto& [name, pred] : sig.predicates) {
        if (pred.builtin != Builtin::None) continue;
        for (int i = 0; i < pred.arity; ++i) {
            Rule r;
            std::vector<Term> args, repl;
            for (int j = 0; j < pred.arity; ++j) {
                args.push_back(var("V" + std::to_string(j)));
                repl.push_back(var(j == i ? "W" : "V" + std::to_string(j)));
            }
            r.body.push_back(Atom{pred, args});
            r.body.push_back(Atom{eq, {args[static_cast<std::size_t>(i)], var("W")}});
            r.head.push_back(Atom{pred, repl});
            out.push_back(canonical_rule(r));
        }
    }
    return out;
}

// Constants occurring anywhere in p or d.
inline std::set<std::string> constants_of(const Program& p, const Dataset& d = {}) {
    std::set<std::string> cs;
    auto scan = [&](const Atom& a) {
        for (const auto& t : a.args)
            if (!t.is_var()) cs.insert(t.name);
    };
    for (const auto& r : p.rules) {
        for (const auto& a : r.body) scan(a);
        for (const auto& a : r.head) scan(a);
    }
    for (const auto& f : d.facts) scan(f);
    return cs;
}

}  // namespace wldlog
