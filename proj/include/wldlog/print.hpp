#pragma once

// Canonical pretty-printing. Programs are stored in canonical form (sorted
// atoms, deterministic variable names), so printing is a direct rendering
// and printing twice yields identical bytes.

#include <sstream>
#include <string>

#include "ast.hpp"

namespace wldlog {

inline std::string print_term(const Term& t) { return t.name; }

inline std::string print_atom(const Atom& a) {
    if (a.pred.builtin == Builtin::Eq)
        return print_term(a.args[0]) + " = " + print_term(a.args[1]);
    if (a.args.empty()) return a.pred.name;
    std::string s = a.pred.name + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ", ";
        s += print_term(a.args[i]);
    }
    s += ")";
    return s;
}

inline std::string print_rule(const Rule& r) {
    std::string s;
    for (std::size_t i = 0; i < r.head.size(); ++i) {
        if (i) s += " | ";
        s += print_atom(r.head[i]);
    }
    if (r.head.empty()) s += "bot";  // not user-writable; shown for traces only
    if (!r.body.empty()) {
        s += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) s += ", ";
            s += print_atom(r.body[i]);
        }
    }
    s += ".";
    return s;
}

inline std::string print_program(const Program& p) {
    std::string s;
    for (const auto& r : p.rules) {
        s += print_rule(r);
        s += "\n";
    }
    return s;
}

inline std::string print_dataset(const Dataset& d) {
    std::string s;
    for (const auto& f : d.facts) {
        s += print_atom(f);
        s += ".\n";
    }
    return s;
}

}  // namespace wldlog
