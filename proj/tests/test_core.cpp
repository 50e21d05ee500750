#include <catch2/catch_amalgamated.hpp>

#include "wldlog/ast.hpp"
#include "wldlog/parse.hpp"
#include "wldlog/print.hpp"

using namespace wldlog;

namespace {

Program p1() {
    return parse_program(
        "b(X) | g(X) :- v(X).\n"
        "b(X) :- g(Y), e(X, Y).\n"
        "g(X) :- b(Y), e(X, Y).\n");
}

Program p3() {
    return parse_program(
        "b(X) | g(X) :- v(X).\n"
        "b(X) :- g(Y), e(X, Y).\n"
        "g(X) :- b(Y), e(X, Y).\n"
        "e(X, Y) :- e(Y, X).\n");
}

std::set<std::string> idb_names(const Program& p) {
    std::set<std::string> out;
    for (const auto& q : idb_predicates(p)) out.insert(q.name);
    return out;
}

}  // namespace

TEST_CASE("parser handles rules, facts, disjunction and bot") {
    Program p = parse_program("b(X) | g(X) :- v(X).");
    REQUIRE(p.rules.size() == 1);
    CHECK(p.rules[0].head.size() == 2);
    CHECK(p.rules[0].body.size() == 1);
    CHECK(p.rules[0].is_disjunctive());

    Program empty = parse_program("");
    CHECK(empty.rules.empty());

    Program botp = parse_program("bot :- b(X), g(X).");
    REQUIRE(botp.rules.size() == 1);
    REQUIRE(botp.rules[0].head.size() == 1);
    CHECK(botp.rules[0].head[0].pred.builtin == Builtin::Bot);

    Program fact = parse_program("a(c).");
    REQUIRE(fact.rules.size() == 1);
    CHECK(fact.rules[0].is_fact());

    Program comments = parse_program("% only a comment\n");
    CHECK(comments.rules.empty());
}

TEST_CASE("parser reads infix equality in heads only for user programs") {
    Program p = parse_program("X = Y :- r(X, Y).");
    REQUIRE(p.rules.size() == 1);
    CHECK(p.rules[0].head[0].pred.builtin == Builtin::Eq);
    // equality in a user rule body is rejected
    CHECK_THROWS_AS(parse_program("a(X) :- r(X, Y), X = Y."), ValidationError);
    // but admitted for internal (derived) programs
    CHECK_NOTHROW(parse_program("a(X) :- r(X, Y), X = Y.", /*internal=*/true));
}

TEST_CASE("parse_dataset") {
    Dataset d = parse_dataset("v(a).\nv(b).\nv(c).\ne(a, b).\ne(b, c).\ne(a, c).\n");
    CHECK(d.facts.size() == 6);
    CHECK(d.facts.count(Atom{Predicate{"v", 1, Builtin::None}, {cst("a")}}) == 1);

    CHECK(parse_dataset("").facts.empty());
    CHECK_THROWS_AS(parse_dataset("v(X)."), ValidationError);   // non-ground
    CHECK_THROWS_AS(parse_dataset("top(a)."), ValidationError); // builtin facts
    CHECK_THROWS_AS(parse_dataset("v(a)"), ParseError);         // missing dot
}

TEST_CASE("validate_program enforces the rule invariants") {
    CHECK(p1().rules.size() == 3);
    CHECK(validate_program({}).rules.empty());
    CHECK_THROWS_AS(parse_program("b(Y) :- v(X)."), ValidationError);   // unsafe
    CHECK_THROWS_AS(parse_program("top(X) :- v(X)."), ValidationError); // top head
    CHECK_THROWS_AS(parse_program("a(X) :- v(X), bot."), ValidationError);
    CHECK_THROWS_AS(parse_program("a(X) :- v(X), v(X, Y)."), ValidationError);  // arity clash
    CHECK_THROWS_AS(parse_program("a'(X) :- v(X)."), ParseError);  // internal name shape
}

TEST_CASE("make_atom checks arity") {
    CHECK_THROWS_AS(make_atom(Predicate{"p", 2, Builtin::None}, {cst("a")}), ValidationError);
    CHECK_NOTHROW(make_atom(Predicate{"p", 1, Builtin::None}, {cst("a")}));
}

TEST_CASE("printing is canonical and round-trips") {
    Program p = p1();
    std::string text = print_program(p);
    CHECK(text == print_program(p));  // byte-identical on reprint
    Program q = parse_program(text);
    REQUIRE(q.rules.size() == p.rules.size());
    for (std::size_t i = 0; i < p.rules.size(); ++i)
        CHECK(rules_equal_upto_renaming(p.rules[i], q.rules[i]));
    CHECK(print_program(Program{}).empty());
}

TEST_CASE("canonical form identifies rules up to variable renaming") {
    Program a = parse_program("b(X) :- g(Y), e(X, Y).");
    Program b = parse_program("b(U) :- e(U, W), g(W).");
    CHECK(rules_equal_upto_renaming(a.rules[0], b.rules[0]));
    Program c = parse_program("b(Y) :- g(X), e(X, Y).");  // different wiring
    CHECK_FALSE(rules_equal_upto_renaming(a.rules[0], c.rules[0]));
    // duplicate atoms collapse
    Program d = parse_program("b(X) :- v(X), v(X).");
    CHECK(d.rules[0].body.size() == 1);
}

TEST_CASE("augment_top materialises the top rules") {
    Program p = augment_top(p1());
    std::size_t tops = 0;
    for (const auto& r : p.rules)
        if (r.top_rule) ++tops;
    // one rule per argument position: v/1, e/2, b/1, g/1; no constants
    CHECK(tops == 5);
    // idempotent
    Program pp = augment_top(p);
    CHECK(print_program(pp) == print_program(p));

    CHECK(augment_top(Program{}).rules.empty());

    Program fact = augment_top(parse_program("a(c)."));
    bool has_const_rule = false;
    for (const auto& r : fact.rules)
        if (r.top_rule && r.body.empty() && r.head[0] == Atom{top_pred(), {cst("c")}})
            has_const_rule = true;
    CHECK(has_const_rule);
}

TEST_CASE("idb_predicates") {
    CHECK(idb_names(p1()) == std::set<std::string>{"b", "g"});
    CHECK(idb_names(p3()) == std::set<std::string>{"b", "e", "g"});
    CHECK(idb_predicates(Program{}).empty());
    // top rules do not contribute
    CHECK(idb_names(augment_top(p1())) == std::set<std::string>{"b", "g"});
}

TEST_CASE("idb_expansion primes IDB predicates and adds bridges") {
    Program p2 = parse_program("a(X) :- r(X, Y, Z), a(Y), a(Z).");
    auto [pe, theta] = idb_expansion(p2);
    REQUIRE(theta.map.size() == 1);
    CHECK(theta.map.at("a").name == "a'");
    REQUIRE(pe.rules.size() == 2);
    Program expected = parse_program(
        "a'(X) :- r(X, Y, Z), a'(Y), a'(Z).\n"
        "a'(X) :- a(X).\n",
        /*internal=*/true);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(rules_equal_upto_renaming(pe.rules[i], expected.rules[i]));
    // every original predicate is EDB in the expansion
    for (const auto& q : idb_predicates(pe)) CHECK(q.name.back() == '\'');

    Program no_idb = parse_program("a(c).");  // fact: a is still IDB
    auto [pe2, theta2] = idb_expansion(no_idb);
    CHECK(theta2.map.count("a") == 1);

    Program body_only;  // program with no rules: nothing to rename
    auto [pe3, theta3] = idb_expansion(body_only);
    CHECK(theta3.empty());
    CHECK(pe3.rules.empty());

    auto [pe4, theta4] = idb_expansion(p1());
    CHECK(theta4.map.size() == 2);
    CHECK(theta4.map.at("b").name == "b'");
    CHECK(theta4.map.at("g").name == "g'");
    CHECK(pe4.rules.size() == 5);  // 3 renamed + 2 bridges
}

TEST_CASE("equality_axioms") {
    Signature none;
    CHECK(equality_axioms(none).empty());

    Signature s1;
    s1.add(Atom{Predicate{"a", 1, Builtin::None}, {var("X")}});
    s1.add(Atom{eq_pred(), {var("X"), var("Y")}});
    auto ax1 = equality_axioms(s1);
    // reflexivity, symmetry, transitivity, one replacement position
    CHECK(ax1.size() == 4);

    Signature s2 = s1;
    s2.add(Atom{Predicate{"r", 2, Builtin::None}, {var("X"), var("Y")}});
    CHECK(equality_axioms(s2).size() == 6);  // two more replacement rules
}

TEST_CASE("renaming validity") {
    Renaming ok;
    ok.map["a"] = Predicate{"x", 1, Builtin::None};
    ok.map["b"] = Predicate{"y", 1, Builtin::None};
    CHECK_NOTHROW(ok.check_valid());
    Renaming bad = ok;
    bad.map["b"] = Predicate{"x", 1, Builtin::None};
    CHECK_THROWS_AS(bad.check_valid(), ValidationError);
    CHECK(ok.apply(Predicate{"a", 1, Builtin::None}).name == "x");
    CHECK(ok.apply(Predicate{"z", 1, Builtin::None}).name == "z");
}

TEST_CASE("signature and constants") {
    Program p = parse_program("a(c) :- r(c, X), b(X).");
    Signature sig = signature_of(p);
    CHECK(sig.predicates.size() == 3);
    CHECK(sig.constants == std::set<std::string>{"c"});
    Dataset d = parse_dataset("b(d).");
    CHECK(signature_of(p, d).constants == std::set<std::string>{"c", "d"});
    CHECK(constants_of(p, d) == std::set<std::string>{"c", "d"});
}
