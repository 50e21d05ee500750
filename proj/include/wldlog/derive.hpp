#pragma once

// Hyperresolution derivation trees: bounded forward search for a normal
// derivation of a ground disjunction, an independent structural checker,
// and text/DOT exports. The calculus: given a rule b1,...,bn -> H and
// premises M_i = N_i v a_i with b_i sigma = a_i for a grounding sigma, the
// hyperresolvent is H sigma v N_1 v ... v N_n. Normality requires every
// node whose label involves top to be the root of a one-step top-stub.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "print.hpp"

namespace wldlog {

struct DerivationNode {
    std::vector<Atom> label;  // disjunction of ground facts, sorted set
    RuleId rule = -1;         // applied rule; -1 marks a dataset-fact leaf
    std::vector<DerivationNode> children;

    bool is_leaf() const { return children.empty(); }
};

struct Derivation {
    DerivationNode root;
};

struct DeriveLimits {
    std::size_t max_depth = 12;
    std::size_t max_label = 4;     // disjuncts per derived label
    std::size_t max_items = 20000;  // distinct derived labels
};

namespace detail {

inline std::vector<Atom> label_of(std::vector<Atom> atoms) {
    sort_unique(atoms);
    return atoms;
}

// matches pattern against a ground atom, extending env; returns names bound
inline bool ground_match(const Atom& pattern, const Atom& fact,
                         std::map<std::string, Term>& env, std::vector<std::string>& bound) {
    if (!(pattern.pred == fact.pred)) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& t = pattern.args[i];
        if (!t.is_var()) {
            if (t == fact.args[i]) continue;
            return false;
        }
        auto it = env.find(t.name);
        if (it != env.end()) {
            if (it->second == fact.args[i]) continue;
            return false;
        }
        env.emplace(t.name, fact.args[i]);
        bound.push_back(t.name);
    }
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checking

struct DerivationReport {
    bool ok = true;
    std::string error;

    explicit operator bool() const { return ok; }
    static DerivationReport fail(std::string msg) { return {false, std::move(msg)}; }
};

namespace detail {

inline bool involves_top(const std::vector<Atom>& label) {
    return std::any_of(label.begin(), label.end(),
                       [](const Atom& a) { return a.pred.builtin == Builtin::Top; });
}

// Searches for a grounding sigma and a choice of resolved-upon atoms a_i in
// the children labels making node.label the hyperresolvent.
inline bool hyperresolvent_matches(const Rule& r, const DerivationNode& node) {
    std::map<std::string, Term> env;
    std::vector<const Atom*> picked(r.body.size(), nullptr);

    auto residue_check = [&]() {
        std::set<Atom> want;
        for (const auto& h : r.head) {
            Atom g = h;
            for (auto& t : g.args)
                if (t.is_var()) {
                    auto it = env.find(t.name);
                    if (it == env.end()) return false;  // sigma does not ground the head
                    t = it->second;
                }
            want.insert(std::move(g));
        }
        for (std::size_t i = 0; i < node.children.size(); ++i)
            for (const auto& a : node.children[i].label)
                if (!(a == *picked[i])) want.insert(a);
        std::set<Atom> got(node.label.begin(), node.label.end());
        return want == got;
    };
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == r.body.size()) return residue_check();
        for (const auto& a : node.children[i].label) {
            std::vector<std::string> bound;
            if (detail::ground_match(r.body[i], a, env, bound)) {
                picked[i] = &a;
                if (self(self, i + 1)) return true;
            }
            for (const auto& v : bound) env.erase(v);
        }
        return false;
    };
    return rec(rec, 0);
}

inline DerivationReport check_node(const Program& prog, const Dataset& d,
                                   const DerivationNode& node) {
    if (node.label.empty()) return DerivationReport::fail("node with an empty label");
    for (const auto& a : node.label)
        if (!a.ground()) return DerivationReport::fail("non-ground label atom " + print_atom(a));

    const Rule* r = node.rule >= 0 ? prog.find_rule(node.rule) : nullptr;

    if (node.is_leaf()) {
        if (node.rule < 0) {
            if (node.label.size() == 1 && d.facts.count(node.label[0]))
                return {};
            return DerivationReport::fail("leaf label is not a dataset fact");
        }
        if (!r) return DerivationReport::fail("leaf cites unknown rule " + std::to_string(node.rule));
        if (!r->body.empty())
            return DerivationReport::fail("leaf cites a rule with a nonempty body");
        std::set<Atom> head(r->head.begin(), r->head.end());
        std::set<Atom> label(node.label.begin(), node.label.end());
        if (head != label) return DerivationReport::fail("leaf label differs from its rule head");
    } else {
        if (!r)
            return DerivationReport::fail("internal node cites unknown rule " +
                                          std::to_string(node.rule));
        if (r->body.size() != node.children.size())
            return DerivationReport::fail("child count differs from rule body size");
        if (!hyperresolvent_matches(*r, node))
            return DerivationReport::fail("label is not a hyperresolvent of rule " +
                                          std::to_string(node.rule) + " and the children");
        for (const auto& c : node.children) {
            auto rep = check_node(prog, d, c);
            if (!rep.ok) return rep;
        }
    }

    // normality: a label involving top must be exactly the root of a top-stub
    if (detail::involves_top(node.label)) {
        bool stub = node.label.size() == 1 && r && r->top_rule &&
                    (node.is_leaf() ||
                     (node.children.size() == 1 && node.children[0].is_leaf() &&
                      node.children[0].rule < 0));
        if (!stub) return DerivationReport::fail("top-involving node is not a top-stub");
    }
    return {};
}

}  // namespace detail

// Verifies the appendix conditions node by node against augment_top(p) and
// d, plus normality; expected is the disjunction the root must carry.
inline DerivationReport check_derivation(const Program& p, const Dataset& d,
                                         const Derivation& rho,
                                         const std::vector<Atom>& expected) {
    Program prog = augment_top(p);
    std::set<Atom> want(expected.begin(), expected.end());
    std::set<Atom> got(rho.root.label.begin(), rho.root.label.end());
    if (want != got) return DerivationReport::fail("root label differs from the query");
    return detail::check_node(prog, d, rho.root);
}

// ---------------------------------------------------------------------------
// Search

namespace detail {

struct ItemStore {
    std::map<std::vector<Atom>, DerivationNode> items;  // label -> derivation
    std::map<std::vector<Atom>, std::size_t> depth;

    bool add(DerivationNode node, std::size_t d) {
        auto key = node.label;
        if (items.count(key)) return false;
        items.emplace(key, std::move(node));
        depth.emplace(std::move(key), d);
        return true;
    }
};

}  // namespace detail

// Bounded forward hyperresolution until the goal label appears. Returns a
// normal derivation, or nullopt when the caps run out (not a disproof). Top
// body atoms are discharged by constructing top-stubs directly, so derived
// labels stay top-free and the result is normal by construction.
inline std::optional<Derivation> find_derivation(const Program& p, const Dataset& d,
                                                 const std::vector<Atom>& goal,
                                                 const DeriveLimits& lim = {}) {
    Program prog = augment_top(p);
    std::vector<Atom> target = detail::label_of(goal);
    for (const auto& a : target)
        if (!a.ground()) throw ValidationError("derivation goals must be ground");

    std::set<std::string> active = constants_of(prog, d);

    // a top-stub for top(c), if one exists
    auto make_stub = [&](const std::string& c) -> std::optional<DerivationNode> {
        Atom top_c{top_pred(), {cst(c)}};
        for (const auto& r : prog.rules) {
            if (!r.top_rule) continue;
            if (r.body.empty()) {
                if (r.head.size() == 1 && r.head[0] == top_c)
                    return DerivationNode{{top_c}, r.id, {}};
                continue;
            }
            // Q(v...) -> top(v_i): find a dataset fact carrying c at position i
            for (const auto& f : d.facts) {
                std::map<std::string, Term> env;
                std::vector<std::string> bound;
                if (!detail::ground_match(r.body[0], f, env, bound)) continue;
                Atom h = r.head[0];
                Term t = h.args[0];
                if (t.is_var()) t = env.at(t.name);
                if (t == cst(c)) {
                    DerivationNode leaf{{f}, -1, {}};
                    return DerivationNode{{top_c}, r.id, {std::move(leaf)}};
                }
            }
        }
        return std::nullopt;
    };

    detail::ItemStore store;
    for (const auto& f : d.facts) store.add(DerivationNode{{f}, -1, {}}, 0);
    for (const auto& r : prog.rules) {
        if (r.top_rule || !r.body.empty()) continue;
        store.add(DerivationNode{detail::label_of(r.head), r.id, {}}, 0);
    }
    if (target.size() == 1 && target[0].pred.builtin == Builtin::Top) {
        if (target[0].args[0].is_var()) return std::nullopt;
        auto stub = make_stub(target[0].args[0].name);
        if (stub) return Derivation{std::move(*stub)};
        return std::nullopt;
    }
    if (store.items.count(target)) return Derivation{store.items.at(target)};

    // index: predicate name -> labels containing an atom over it
    auto build_index = [&]() {
        std::map<std::string, std::vector<const std::vector<Atom>*>> ix;
        for (const auto& [label, node] : store.items)
            for (std::set<std::string> seen; const Atom& a : label)
                if (seen.insert(a.pred.name).second) ix[a.pred.name].push_back(&label);
        return ix;
    };

    bool grew = true;
    while (grew && store.items.size() < lim.max_items) {
        grew = false;
        auto ix = build_index();
        std::vector<DerivationNode> found;

        for (const auto& r : prog.rules) {
            if (r.top_rule || r.body.empty()) continue;
            std::vector<std::size_t> plain, tops;
            for (std::size_t i = 0; i < r.body.size(); ++i)
                (r.body[i].pred.builtin == Builtin::Top ? tops : plain).push_back(i);

            std::map<std::string, Term> env;
            std::vector<const std::vector<Atom>*> premise(r.body.size(), nullptr);
            std::vector<const Atom*> picked(r.body.size(), nullptr);

            auto finish = [&](auto&& finish_self, std::size_t ti) -> void {
                if (ti == tops.size()) {
                    // assemble: head env + residues + stubs
                    std::vector<Atom> label;
                    std::size_t depth = 0;
                    for (const auto& h : r.head) {
                        Atom g = h;
                        for (auto& t : g.args)
                            if (t.is_var()) t = env.at(t.name);
                        label.push_back(std::move(g));
                    }
                    for (std::size_t i : plain) {
                        for (const auto& a : *premise[i])
                            if (!(a == *picked[i])) label.push_back(a);
                        depth = std::max(depth, store.depth.at(*premise[i]));
                    }
                    label = detail::label_of(std::move(label));
                    if (label.size() > lim.max_label) return;
                    if (depth + 1 > lim.max_depth) return;
                    if (store.items.count(label)) return;
                    for (const auto& n : found)
                        if (n.label == label) return;

                    DerivationNode node{label, r.id, {}};
                    for (std::size_t i = 0; i < r.body.size(); ++i) {
                        if (r.body[i].pred.builtin == Builtin::Top) {
                            Term t = r.body[i].args[0];
                            if (t.is_var()) t = env.at(t.name);
                            auto stub = make_stub(t.name);
                            if (!stub) return;
                            node.children.push_back(std::move(*stub));
                        } else {
                            node.children.push_back(store.items.at(*premise[i]));
                        }
                    }
                    found.push_back(std::move(node));
                    return;
                }
                std::size_t i = tops[ti];
                const Term& t = r.body[i].args[0];
                if (!t.is_var() || env.count(t.name)) {
                    finish_self(finish_self, ti + 1);
                    return;
                }
                for (const auto& c : active) {
                    env.emplace(t.name, cst(c));
                    finish_self(finish_self, ti + 1);
                    env.erase(t.name);
                }
            };
            auto rec = [&](auto&& self, std::size_t pi) -> void {
                if (pi == plain.size()) {
                    finish(finish, 0);
                    return;
                }
                std::size_t i = plain[pi];
                auto it = ix.find(r.body[i].pred.name);
                if (it == ix.end()) return;
                for (const auto* labelp : it->second) {
                    for (const auto& a : *labelp) {
                        std::vector<std::string> bound;
                        if (detail::ground_match(r.body[i], a, env, bound)) {
                            premise[i] = labelp;
                            picked[i] = &a;
                            self(self, pi + 1);
                        }
                        for (const auto& v : bound) env.erase(v);
                    }
                }
            };
            rec(rec, 0);
        }

        for (auto& node : found) {
            std::size_t depth = 0;
            for (const auto& c : node.children) {
                auto it = store.depth.find(c.label);
                depth = std::max(depth, it == store.depth.end() ? std::size_t{1}
                                                               : it->second);
            }
            if (store.add(node, depth + 1)) grew = true;
            if (store.items.size() >= lim.max_items) break;
        }
        if (store.items.count(target)) return Derivation{store.items.at(target)};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Exports

inline std::string print_label(const std::vector<Atom>& label) {
    std::string s;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (i) s += " | ";
        s += print_atom(label[i]);
    }
    return s;
}

inline std::string export_text(const DerivationNode& node, int indent = 0) {
    std::string s(static_cast<std::size_t>(indent) * 2, ' ');
    s += print_label(node.label);
    if (node.rule >= 0)
        s += "   [rule " + std::to_string(node.rule) + "]";
    else
        s += "   [fact]";
    s += "\n";
    for (const auto& c : node.children) s += export_text(c, indent + 1);
    return s;
}

inline std::string export_dot(const Derivation& rho) {
    std::string s = "digraph derivation {\n  node [shape=box];\n";
    int next = 0;
    auto rec = [&](auto&& self, const DerivationNode& n) -> int {
        int id = next++;
        s += "  n" + std::to_string(id) + " [label=\"" + print_label(n.label);
        if (n.rule >= 0) s += "\\n(rule " + std::to_string(n.rule) + ")";
        s += "\"];\n";
        for (const auto& c : n.children) {
            int cid = self(self, c);
            s += "  n" + std::to_string(id) + " -> n" + std::to_string(cid) + ";\n";
        }
        return id;
    };
    rec(rec, rho.root);
    s += "}\n";
    return s;
}

}  // namespace wldlog
