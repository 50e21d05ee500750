#include <catch2/catch_amalgamated.hpp>

#include "wldlog/analysis.hpp"
#include "wldlog/engine.hpp"
#include "wldlog/oracle.hpp"
#include "wldlog/parse.hpp"
#include "wldlog/print.hpp"
#include "wldlog/rlor.hpp"
#include "wldlog/xi.hpp"

using namespace wldlog;

namespace {

bool contains_rule(const Program& p, const Rule& r) {
    for (const auto& s : p.rules)
        if (!s.top_rule && canonical_key(s) == canonical_key(r)) return true;
    return false;
}

}  // namespace

TEST_CASE("ontology parsing") {
    auto axs = parse_ontology("disjunction(v, b, g).");
    REQUIRE(axs.size() == 1);
    CHECK(axs[0].kind == AxiomKind::Disjunction);
    CHECK(axs[0].names == std::vector<std::string>{"v", "b", "g"});

    CHECK(parse_ontology("").empty());
    CHECK_THROWS_AS(parse_ontology("subClassOf(or(a, b), c)."), ParseError);
    CHECK_THROWS_AS(parse_ontology("frobnicate(a, b)."), ParseError);
    CHECK_THROWS_AS(parse_ontology("subClassOf(a, top)."), ParseError);
    CHECK_THROWS_AS(parse_ontology("subClassOf(bot, a)."), ParseError);
    CHECK_THROWS_AS(parse_ontology("disjunction(a, b, top)."), ParseError);
    CHECK_THROWS_AS(parse_ontology("subClassOf(some(r, a), bot)."), ParseError);
}

TEST_CASE("n-ary unions normalise into chained binary axioms") {
    auto axs = parse_ontology("disjunction(v, r, g, b).");
    REQUIRE(axs.size() == 2);
    CHECK(axs[0].names[0] == "v");
    CHECK(axs[0].names[1] == "r");
    CHECK(axs[1].names[0] == axs[0].names[2]);  // fresh helper chains
    CHECK(axs[1].names == std::vector<std::string>({axs[0].names[2], "g", "b"}));
}

TEST_CASE("each axiom form compiles to its rule") {
    CHECK(contains_rule(compile_ontology("disjunction(v, b, g)."),
                        parse_program("b(X) | g(X) :- v(X).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(and(a, b), c)."),
                        parse_program("c(X) :- a(X), b(X).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(some(r, a), b)."),
                        parse_program("b(X) :- r(X, Y), a(Y).").rules[0]));
    CHECK(contains_rule(compile_ontology("subRole(r, s)."),
                        parse_program("s(X, Y) :- r(X, Y).").rules[0]));
    CHECK(contains_rule(compile_ontology("subRole(r, inv(s))."),
                        parse_program("s(Y, X) :- r(X, Y).").rules[0]));
    CHECK(contains_rule(compile_ontology("subRoleChain(r, s, t)."),
                        parse_program("t(X, Z) :- r(X, Y), s(Y, Z).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(a, self(r))."),
                        parse_program("r(X, X) :- a(X).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(self(r), a)."),
                        parse_program("a(X) :- r(X, X).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(one(i), a)."),
                        parse_program("a(i).").rules[0]));
    CHECK(contains_rule(compile_ontology("subClassOf(a, bot)."),
                        parse_program("bot :- a(X), top(X).", true).rules[0]));
}

TEST_CASE("nominal and cardinality axioms produce equality heads and congruence") {
    Program nom = compile_ontology("subClassOf(a, one(i)).");
    CHECK(contains_rule(nom, parse_program("X = i :- a(X).", true).rules[0]));
    CHECK(signature_of(nom).predicates.count("eq") == 1);
    // congruence axioms appended
    bool has_symmetry = false;
    for (const auto& r : nom.rules)
        if (r.body.size() == 1 && r.body[0].pred.builtin == Builtin::Eq &&
            r.head[0].pred.builtin == Builtin::Eq)
            has_symmetry = true;
    CHECK(has_symmetry);

    Program card = compile_ontology("maxCard(a, r, b).");
    bool found = false;
    for (const auto& r : card.rules)
        if (r.body.size() == 5 && r.head.size() == 1 && r.head[0].pred.builtin == Builtin::Eq)
            found = true;
    CHECK(found);
}

TEST_CASE("maxCard semantics: two distinct fillers merge") {
    Program p = compile_ontology("maxCard(a, r, b).");
    Dataset d = parse_dataset("a(x).\nr(x, y).\nb(y).\nr(x, z).\nb(z).\nc(y).\n");
    EvalResult r = evaluate(p, d);
    CHECK(r.holds(Atom{eq_pred(), {cst("y"), cst("z")}}));
    CHECK(r.holds(Atom{Predicate{"c", 1, Builtin::None}, {cst("z")}}));  // congruence
}

TEST_CASE("the plain subclass form reads as a conjunction with top") {
    Program p = compile_ontology("subClassOf(a, c).");
    CHECK(contains_rule(p, parse_program("c(X) :- a(X), top(X).", true).rules[0]));
    // semantics: a(x) entails c(x)
    CHECK(entails(p, parse_dataset("a(d)."), Atom{Predicate{"c", 1, Builtin::None}, {cst("d")}}));
}

TEST_CASE("the colourability ontology decides 3-colourability") {
    Program p = compile_ontology(
        "disjunction(v, r, g, b).\n"
        "subClassOf(some(edge, r), re).\n"
        "subClassOf(some(edge, g), ge).\n"
        "subClassOf(some(edge, b), be).\n"
        "subClassOf(and(r, re), bot).\n"
        "subClassOf(and(g, ge), bot).\n"
        "subClassOf(and(b, be), bot).\n"
        "subClassOf(and(b, g), bot).\n"
        "subClassOf(and(g, r), bot).\n"
        "subClassOf(and(b, r), bot).\n");
    CHECK(p.rules.size() == 11);
    std::string tri =
        "v(n1).\nv(n2).\nv(n3).\n"
        "edge(n1, n2).\nedge(n2, n1).\nedge(n1, n3).\nedge(n3, n1).\n"
        "edge(n2, n3).\nedge(n3, n2).\n";
    CHECK_FALSE(cautious_eval(p, parse_dataset(tri)).unsat);
    std::string k4 = tri +
        "v(n4).\nedge(n1, n4).\nedge(n4, n1).\nedge(n2, n4).\nedge(n4, n2).\n"
        "edge(n3, n4).\nedge(n4, n3).\n";
    CHECK(cautious_eval(p, parse_dataset(k4)).unsat);
}

TEST_CASE("compiled rules have few variables and atoms") {
    Program p = compile_ontology(
        "maxCard(a, r, b).\nsubClassOf(and(a, b), c).\nsubRoleChain(r, s, t).\n");
    for (const auto& r : p.rules) {
        CHECK(r.body.size() <= 5);
        CHECK(r.body_vars().size() <= 3);
    }
}
