#pragma once

// Ontology front-end: a small functional-style surface syntax for the
// normalised axiom forms of the RL dialect with disjunction, compiled one
// rule per axiom. Concepts are unary predicates, roles binary predicates,
// individuals constants; `top`/`bot` name the builtin concepts.
//
//   axiom ::= 'subClassOf' '(' lhs ',' rhs ')' '.'
//           | 'subRole' '(' role ',' role-or-inv ')' '.'
//           | 'subRoleChain' '(' role ',' role ',' role ')' '.'
//           | 'maxCard' '(' concept ',' role ',' concept ')' '.'
//           | 'disjunction' '(' concept ',' concept (',' concept)+ ')' '.'
//   lhs   ::= concept | 'and' '(' concept ',' concept ')'
//           | 'some' '(' role ',' concept ')' | 'self' '(' role ')'
//           | 'one' '(' individual ')'
//   rhs   ::= concept | 'bot' | 'self' '(' role ')' | 'one' '(' individual ')'
//
// Unions with more than two disjuncts are normalised into chained binary
// axioms over fresh (primed) helper concepts.

#include <string>
#include <vector>

#include "ast.hpp"
#include "parse.hpp"

namespace wldlog {

enum class AxiomKind {
    MaxCard = 1,       // A ⊑ ≤1 R.B
    ConjSub = 2,       // A ⊓ B ⊑ C
    SomeSub = 3,       // ∃R.A ⊑ B
    RoleSub = 4,       // R ⊑ S
    RoleChain = 5,     // R ∘ S ⊑ T
    SelfRight = 6,     // A ⊑ Self(R)
    SelfLeft = 7,      // Self(R) ⊑ A
    InvRoleSub = 8,    // R ⊑ S⁻
    NominalRight = 9,  // A ⊑ {a}
    NominalLeft = 10,  // {a} ⊑ A
    Disjunction = 11,  // A ⊑ B ⊔ C
};

struct RlorAxiom {
    AxiomKind kind;
    std::vector<std::string> names;  // payload, in the order of the form above
};

namespace detail {

// functional term tree over the ontology syntax
struct OntExpr {
    std::string functor;  // empty for a bare name
    std::string name;
    std::vector<OntExpr> args;
    SourceSpan span;

    bool bare() const { return functor.empty(); }
};

class RlorParser {
   public:
    explicit RlorParser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

    std::vector<RlorAxiom> axioms() {
        std::vector<RlorAxiom> out;
        while (cur_.kind != TokKind::End) {
            axiom(out);
            expect(TokKind::Dot, "'.'");
        }
        return out;
    }

   private:
    Lexer lex_;
    Token cur_;
    int fresh_ = 0;

    [[noreturn]] void err(const std::string& msg, SourceSpan s) { throw ParseError(msg, s); }

    Token consume() {
        Token t = cur_;
        cur_ = lex_.next();
        return t;
    }
    Token expect(TokKind k, const char* what) {
        if (cur_.kind != k) err(std::string("expected ") + what, cur_.span);
        return consume();
    }

    OntExpr expr() {
        Token name = expect(TokKind::Ident, "name");
        OntExpr e;
        e.span = name.span;
        if (cur_.kind != TokKind::LParen) {
            e.name = name.text;
            return e;
        }
        consume();
        e.functor = name.text;
        e.args.push_back(expr());
        while (cur_.kind == TokKind::Comma) {
            consume();
            e.args.push_back(expr());
        }
        expect(TokKind::RParen, "')'");
        return e;
    }

    std::string bare(const OntExpr& e, const char* what) {
        if (!e.bare()) err(std::string("expected a ") + what + ", got " + e.functor + "(...)",
                           e.span);
        return e.name;
    }
    std::string concept_name(const OntExpr& e) { return bare(e, "concept name"); }
    // a concept on the left of ⊑ (atomic or top)
    std::string body_concept(const OntExpr& e) {
        std::string n = concept_name(e);
        if (n == "bot") err("bot may not occur on the left side of an axiom", e.span);
        return n;
    }
    // an atomic concept in head position (neither top nor bot)
    std::string atomic_concept(const OntExpr& e) {
        std::string n = concept_name(e);
        if (n == "top" || n == "bot") err("an atomic concept is required here", e.span);
        return n;
    }
    std::string role_name(const OntExpr& e) {
        std::string n = bare(e, "role name");
        if (n == "top" || n == "bot") err("top/bot are not roles", e.span);
        return n;
    }
    std::string individual(const OntExpr& e) {
        std::string n = bare(e, "individual name");
        if (is_reserved_name(n)) err("reserved name used as an individual", e.span);
        return n;
    }

    void axiom(std::vector<RlorAxiom>& out) {
        OntExpr e = expr();
        if (e.bare()) err("expected an axiom", e.span);
        if (e.functor == "subClassOf") {
            if (e.args.size() != 2) err("subClassOf takes two arguments", e.span);
            sub_class(e.args[0], e.args[1], out);
        } else if (e.functor == "subRole") {
            if (e.args.size() != 2) err("subRole takes two arguments", e.span);
            const OntExpr& rhs = e.args[1];
            if (rhs.bare())
                out.push_back({AxiomKind::RoleSub, {role_name(e.args[0]), role_name(rhs)}});
            else if (rhs.functor == "inv" && rhs.args.size() == 1)
                out.push_back(
                    {AxiomKind::InvRoleSub, {role_name(e.args[0]), role_name(rhs.args[0])}});
            else
                err("the right side of subRole must be a role or inv(role)", rhs.span);
        } else if (e.functor == "subRoleChain") {
            if (e.args.size() != 3) err("subRoleChain takes three arguments", e.span);
            out.push_back({AxiomKind::RoleChain,
                           {role_name(e.args[0]), role_name(e.args[1]), role_name(e.args[2])}});
        } else if (e.functor == "maxCard") {
            if (e.args.size() != 3) err("maxCard takes three arguments", e.span);
            out.push_back({AxiomKind::MaxCard,
                           {body_concept(e.args[0]), role_name(e.args[1]),
                            body_concept(e.args[2])}});
        } else if (e.functor == "disjunction") {
            if (e.args.size() < 3) err("disjunction takes a concept and two or more disjuncts",
                                       e.span);
            std::string lhs = body_concept(e.args[0]);
            std::vector<std::string> ds;
            for (std::size_t i = 1; i < e.args.size(); ++i) {
                std::string dn = concept_name(e.args[i]);
                if (dn == "top") err("top may not occur as a disjunct", e.args[i].span);
                ds.push_back(std::move(dn));
            }
            // chain n-ary unions into binary ones over fresh helper concepts
            while (ds.size() > 2) {
                std::string helper = "u" + std::to_string(fresh_++) + "'";
                out.push_back({AxiomKind::Disjunction, {lhs, ds.front(), helper}});
                lhs = helper;
                ds.erase(ds.begin());
            }
            out.push_back({AxiomKind::Disjunction, {lhs, ds[0], ds[1]}});
        } else {
            err("unknown axiom form: " + e.functor, e.span);
        }
    }

    void sub_class(const OntExpr& l, const OntExpr& r, std::vector<RlorAxiom>& out) {
        if (!r.bare() && r.functor == "self" && r.args.size() == 1) {
            out.push_back({AxiomKind::SelfRight, {body_concept(l), role_name(r.args[0])}});
            return;
        }
        if (!r.bare() && r.functor == "one" && r.args.size() == 1) {
            out.push_back({AxiomKind::NominalRight, {body_concept(l), individual(r.args[0])}});
            return;
        }
        if (!r.bare()) err("the right side must be a concept, bot, self(role) or one(individual)",
                           r.span);
        if (r.name == "top") err("top may not occur on the right side of an axiom", r.span);
        if (l.bare()) {
            // A ⊑ C read as A ⊓ ⊤ ⊑ C
            out.push_back({AxiomKind::ConjSub, {body_concept(l), "top", r.name}});
            return;
        }
        if (l.functor == "and" && l.args.size() == 2) {
            out.push_back({AxiomKind::ConjSub,
                           {body_concept(l.args[0]), body_concept(l.args[1]), r.name}});
        } else if (l.functor == "some" && l.args.size() == 2) {
            out.push_back({AxiomKind::SomeSub,
                           {role_name(l.args[0]), body_concept(l.args[1]), atomic_concept(r)}});
        } else if (l.functor == "self" && l.args.size() == 1) {
            out.push_back({AxiomKind::SelfLeft, {role_name(l.args[0]), atomic_concept(r)}});
        } else if (l.functor == "one" && l.args.size() == 1) {
            out.push_back({AxiomKind::NominalLeft, {individual(l.args[0]), atomic_concept(r)}});
        } else if (l.functor == "or") {
            err("disjunction on the left side is not a normalised form", l.span);
        } else {
            err("unknown concept constructor: " + l.functor, l.span);
        }
    }
};

inline Atom concept_atom(const std::string& name, const Term& t) {
    if (name == "top") return Atom{top_pred(), {t}};
    if (name == "bot") return Atom{bot_pred(), {}};
    return Atom{Predicate{name, 1, Builtin::None}, {t}};
}

inline Atom role_atom(const std::string& name, const Term& a, const Term& b) {
    return Atom{Predicate{name, 2, Builtin::None}, {a, b}};
}

}  // namespace detail

inline std::vector<RlorAxiom> parse_ontology(std::string_view text) {
    detail::RlorParser parser(text);
    return parser.axioms();
}

// One rule per axiom, following the translation table; equality congruence
// rules are appended when some axiom produced an eq head.
inline Program compile(const std::vector<RlorAxiom>& axioms) {
    using detail::concept_atom;
    using detail::role_atom;
    std::vector<Rule> raw;
    Term x = var("X"), y = var("Y"), z = var("Z"), x1 = var("X1"), x2 = var("X2");

    for (const auto& ax : axioms) {
        const auto& n = ax.names;
        Rule r;
        switch (ax.kind) {
            case AxiomKind::MaxCard:
                r.body = {concept_atom(n[0], z), role_atom(n[1], z, x1), concept_atom(n[2], x1),
                          role_atom(n[1], z, x2), concept_atom(n[2], x2)};
                r.head = {Atom{eq_pred(), {x1, x2}}};
                break;
            case AxiomKind::ConjSub:
                r.body = {concept_atom(n[0], x), concept_atom(n[1], x)};
                r.head = {concept_atom(n[2], x)};
                break;
            case AxiomKind::SomeSub:
                r.body = {role_atom(n[0], x, y), concept_atom(n[1], y)};
                r.head = {concept_atom(n[2], x)};
                break;
            case AxiomKind::RoleSub:
                r.body = {role_atom(n[0], x1, x2)};
                r.head = {role_atom(n[1], x1, x2)};
                break;
            case AxiomKind::RoleChain:
                r.body = {role_atom(n[0], x1, z), role_atom(n[1], z, x2)};
                r.head = {role_atom(n[2], x1, x2)};
                break;
            case AxiomKind::SelfRight:
                r.body = {concept_atom(n[0], x)};
                r.head = {role_atom(n[1], x, x)};
                break;
            case AxiomKind::SelfLeft:
                r.body = {role_atom(n[0], x, x)};
                r.head = {concept_atom(n[1], x)};
                break;
            case AxiomKind::InvRoleSub:
                r.body = {role_atom(n[0], x, y)};
                r.head = {role_atom(n[1], y, x)};
                break;
            case AxiomKind::NominalRight:
                r.body = {concept_atom(n[0], x)};
                r.head = {Atom{eq_pred(), {x, cst(n[1])}}};
                break;
            case AxiomKind::NominalLeft:
                r.head = {concept_atom(n[1], cst(n[0]))};
                break;
            case AxiomKind::Disjunction:
                r.body = {concept_atom(n[0], x)};
                r.head = {concept_atom(n[1], x), concept_atom(n[2], x)};
                break;
        }
        raw.push_back(std::move(r));
    }

    Program p = validate_program(std::move(raw), Provenance::Derived, /*internal=*/true);
    bool has_eq = signature_of(p).predicates.count("eq") > 0;
    if (has_eq) {
        std::vector<Rule> with_eq = p.rules;
        for (auto& r : equality_axioms(signature_of(p))) with_eq.push_back(std::move(r));
        p = validate_program(std::move(with_eq), Provenance::Derived, /*internal=*/true);
    }
    return p;
}

inline Program compile_ontology(std::string_view text) { return compile(parse_ontology(text)); }

}  // namespace wldlog
