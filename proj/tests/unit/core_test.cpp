#include <doctest.h>

#include "../support.hpp"
#include "pecr/core.hpp"
#include "pecr/equivalence.hpp"

using namespace pecr;

TEST_CASE("statement parsing") {
    auto s = parse_statement("add [a b] [c]");
    CHECK(s.name == "add");
    CHECK(s.ins == TokenList{"a", "b"});
    CHECK(s.outs == TokenList{"c"});
    CHECK(parse_statement("typei [a] [ ]").outs.empty());
    CHECK_THROWS_AS(parse_statement("add [a b c]"), Error);
    CHECK(to_string(s) == "add [a b] [c]");
}

TEST_CASE("program validation") {
    ConstSet cst;
    auto thm1 = testing::corpus("int", "thm1");
    Program body;
    for (auto& l : thm1.lines)
        if (l.stmt) body.push_back(*l.stmt);
    CHECK(body.size() == 16);
    CHECK(validate_program(body, cst).ok());

    auto dup = validate_program(parse_program("add [a b] [c]\nmult [a d] [c]"), cst);
    REQUIRE_FALSE(dup.ok());
    CHECK(dup.errors[0].kind == StructuralIssue::Kind::DuplicateOutput);
    CHECK(dup.errors[0].var == "c");

    auto fwd = validate_program(parse_program("add [a e] [c]\nmult [a b] [e]"), cst);
    REQUIRE_FALSE(fwd.ok());
    CHECK(fwd.errors[0].kind == StructuralIssue::Kind::ForwardBinding);
    CHECK(fwd.errors[0].var == "e");
}

TEST_CASE("piv and free variables") {
    ConstSet cst;
    Program p = parse_program("add [a b] [c]\nmult [-1 b] [d]");
    CHECK(piv(p) == TokenList{"a", "b", "-1"});
    CHECK(free_vars(p, cst) == TokenList{"a", "b"});
    CHECK(piv(parse_program("add [a b] [c]\nadd [c a] [d]")) == TokenList{"a", "b"});
    CHECK(piv({}).empty());
    CHECK(free_vars({}, cst).empty());
}

TEST_CASE("concatenation") {
    ConstSet cst;
    auto thm1 = testing::corpus("int", "thm1");
    Program c = concat(thm1.premise, parse_program("add [b d] [e]"), cst);
    CHECK(c.size() == 3);
    CHECK(prgm_equiv(concat(thm1.premise, {}, cst), thm1.premise));
    try {
        concat(parse_program("add [a b] [c]"), parse_program("mult [x y] [c]"), cst);
        FAIL("expected a name clash");
    } catch (const Error& e) {
        CHECK(e.kind() == "NameClash");
    }
}

TEST_CASE("list operations") {
    CHECK(unique({"a", "b", "b", "a"}) == TokenList{"a", "b"});
    CHECK(setminus({"a", "b", "c"}, {"b"}) == TokenList{"a", "c"});
    CHECK(intersection({"a", "b"}, {"b", "d"}) == TokenList{"b"});
}

TEST_CASE("sublists and program equivalence") {
    Program a = parse_program("a [ ] [ ]\nb [ ] [ ]\nc [ ] [ ]");
    Program b = parse_program("a [ ] [ ]\nb [ ] [ ]\nb [ ] [ ]\na [ ] [ ]");
    CHECK(is_sublist(b, a));
    Program p = parse_program("b [ ] [ ]\nb [ ] [ ]\nc [ ] [ ]\na [ ] [ ]");
    CHECK(is_sublist(p, a));
    CHECK(is_sublist(a, p));
    CHECK(prgm_equiv(p, a));
    CHECK(is_sublist({}, p));

    auto thm47 = testing::corpus("vec", "thm47");
    Program prem = testing::corpus("int", "thm2").premise;
    Program perm(prem.rbegin(), prem.rend());
    CHECK(prgm_equiv(prem, perm));
    CHECK(prgm_equiv(thm47.premise, thm47.premise));
}

TEST_CASE("equivalence of disjunctive programs") {
    CHECK(prgm_equiv(parse_pseq("a [ ] [ ] | b [ ] [ ]"), parse_pseq("b [ ] [ ] | a [ ] [ ]")));
    CHECK(prgm_equiv(parse_pseq("[p [ ] [ ] a [ ] [ ] q [ ] [ ]] | [p [ ] [ ] b [ ] [ ] q [ ] [ ]]"),
                     parse_pseq("p [ ] [ ] (a [ ] [ ] | b [ ] [ ]) q [ ] [ ]")));
    CHECK_FALSE(prgm_equiv(parse_pseq("a [ ] [ ] | b [ ] [ ]"), parse_pseq("a [ ] [ ]")));
}

TEST_CASE("I/O equivalence") {
    ConstSet cst;
    auto s = io_equiv(parse_program("add [b a] [g]"), parse_program("add [a b] [c]"), cst);
    REQUIRE(s);
    auto all = s->all();
    CHECK(all.at("a") == "b");
    CHECK(all.at("b") == "a");
    CHECK(all.at("c") == "g");

    Program p = testing::corpus("int", "thm2").premise;
    auto id = io_equiv(p, p, cst);
    REQUIRE(id);
    for (auto& [k, v] : id->all()) CHECK(k == v);

    CHECK(io_equiv(parse_program("mult [u u] [w]"), parse_program("mult [a b] [c]"), cst));
    MatchFailure why;
    CHECK_FALSE(io_equiv(parse_program("mult [u v] [w]"), parse_program("mult [a a] [c]"), cst, false, &why));
    CHECK(why.condition == 1);
}
