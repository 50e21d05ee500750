#pragma once

// Dependency graph, datalog/disjunctive predicate classification, and the
// linearity / weak-linearity tests.

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "print.hpp"

namespace wldlog {

struct DependencyGraph {
    std::set<Predicate> vertices;
    // labels: (body predicate, head predicate) -> rule ids
    std::map<std::pair<std::string, std::string>, std::set<RuleId>> labels;

    bool has_edge(const std::string& from, const std::string& to) const {
        auto it = labels.find({from, to});
        return it != labels.end() && !it->second.empty();
    }
    std::size_t edge_count() const { return labels.size(); }
};

// Smallest edge-labelled digraph with r in mu(P,Q) whenever P occurs in the
// body and Q in the head of r, for r outside P_top.
inline DependencyGraph dependency_graph(const Program& p) {
    DependencyGraph g;
    for (const auto& r : p.rules) {
        if (r.top_rule) continue;
        for (const auto& a : r.body) g.vertices.insert(a.pred);
        for (const auto& a : r.head) g.vertices.insert(a.pred);
        for (const auto& b : r.body)
            for (const auto& h : r.head)
                g.labels[{b.pred.name, h.pred.name}].insert(r.id);
    }
    return g;
}

enum class PredicateClass { Datalog, Disjunctive };

struct DisjunctiveWitness {
    RuleId disjunctive_rule = -1;
    // path of predicate names ending in the classified predicate; the first
    // element heads the cited disjunctive rule
    std::vector<std::string> path;
};

struct PredicateClassification {
    std::map<std::string, PredicateClass> cls;
    std::map<std::string, DisjunctiveWitness> witnesses;

    bool is_disjunctive(const std::string& pred) const {
        auto it = cls.find(pred);
        return it != cls.end() && it->second == PredicateClass::Disjunctive;
    }
};

// A predicate is disjunctive iff it depends on a disjunctive rule: some path
// in G_P ending in it involves an edge labelled by a disjunctive rule. Head
// predicates of a disjunctive rule are seeds (this covers disjunctive fact
// rules, which contribute no edges), and the property propagates forward.
inline PredicateClassification classify_predicates(const Program& p) {
    DependencyGraph g = dependency_graph(p);
    PredicateClassification out;
    for (const auto& v : g.vertices) out.cls[v.name] = PredicateClass::Datalog;

    std::deque<std::string> queue;
    for (const auto& r : p.rules) {
        if (r.top_rule || !r.is_disjunctive()) continue;
        for (const auto& h : r.head) {
            if (out.is_disjunctive(h.pred.name)) continue;
            out.cls[h.pred.name] = PredicateClass::Disjunctive;
            DisjunctiveWitness w{r.id, {}};
            if (!r.body.empty()) w.path.push_back(r.body.front().pred.name);
            w.path.push_back(h.pred.name);
            out.witnesses[h.pred.name] = std::move(w);
            queue.push_back(h.pred.name);
        }
    }
    // forward closure over edges
    std::multimap<std::string, std::string> succ;
    for (const auto& [edge, rules] : g.labels) succ.emplace(edge.first, edge.second);
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        auto [lo, hi] = succ.equal_range(cur);
        for (auto it = lo; it != hi; ++it) {
            const std::string& next = it->second;
            if (out.is_disjunctive(next)) continue;
            out.cls[next] = PredicateClass::Disjunctive;
            auto w = out.witnesses.at(cur);
            w.path.push_back(next);
            out.witnesses[next] = std::move(w);
            queue.push_back(next);
        }
    }
    return out;
}

struct OffendingAtom {
    RuleId rule;
    Atom atom;
};

struct LinearityReport {
    bool holds = true;
    std::vector<OffendingAtom> offenders;  // extra restricted atoms per violating rule
    explicit operator bool() const { return holds; }
};

// True iff every rule has at most one IDB body atom.
inline LinearityReport is_linear(const Program& p) {
    auto idb = idb_predicates(p);
    LinearityReport rep;
    for (const auto& r : p.rules) {
        if (r.top_rule) continue;
        std::vector<const Atom*> idb_atoms;
        for (const auto& a : r.body)
            if (idb.count(a.pred)) idb_atoms.push_back(&a);
        if (idb_atoms.size() > 1) {
            rep.holds = false;
            for (const auto* a : idb_atoms) rep.offenders.push_back({r.id, *a});
        }
    }
    return rep;
}

// True iff every rule body contains at most one atom over a disjunctive
// predicate; counted per atom occurrence.
inline LinearityReport is_wl(const Program& p) {
    auto cls = classify_predicates(p);
    LinearityReport rep;
    for (const auto& r : p.rules) {
        if (r.top_rule) continue;
        std::vector<const Atom*> disj_atoms;
        for (const auto& a : r.body)
            if (cls.is_disjunctive(a.pred.name)) disj_atoms.push_back(&a);
        if (disj_atoms.size() > 1) {
            rep.holds = false;
            for (const auto* a : disj_atoms) rep.offenders.push_back({r.id, *a});
        }
    }
    return rep;
}

// Graphviz rendering: edge labels are rule ids, vertices styled by class.
inline std::string export_dot(const DependencyGraph& g, const PredicateClassification& c) {
    std::string s = "digraph dependencies {\n";
    for (const auto& v : g.vertices) {
        s += "  \"" + v.name + "\"";
        s += c.is_disjunctive(v.name) ? " [shape=doublecircle];\n" : " [shape=circle];\n";
    }
    for (const auto& [edge, rules] : g.labels) {
        s += "  \"" + edge.first + "\" -> \"" + edge.second + "\" [label=\"";
        bool first = true;
        for (RuleId id : rules) {
            if (!first) s += ",";
            s += std::to_string(id);
            first = false;
        }
        s += "\"];\n";
    }
    s += "}\n";
    return s;
}

}  // namespace wldlog
