#include <doctest.h>

#include <algorithm>
#include <optional>

#include "../support.hpp"
#include "pecr/kernel.hpp"

using namespace pecr;

namespace {

bool has(const std::vector<Option>& opts, const std::string& text) {
    return std::any_of(opts.begin(), opts.end(), [&](const Option& o) { return o.render() == text; });
}

std::optional<Option> find(const std::vector<Option>& opts, const std::string& label, std::vector<int> cl) {
    std::sort(cl.begin(), cl.end());
    for (auto& o : opts) {
        auto c = o.cl;
        std::sort(c.begin(), c.end());
        if (o.label == label && c == cl) return o;
    }
    return std::nullopt;
}

Session session(const std::string& theory, const std::string& premises, std::vector<bool> stars = {}) {
    return Session(testing::theory(theory), parse_program(premises), stars);
}

} // namespace

TEST_CASE("options of a one-line derivation") {
    auto s = session("int", "add [a b] [c]");
    auto opts = s.enumerate_options();
    CHECK(has(opts, "add [b a] [d]  axi2a [1]"));
    CHECK(has(opts, "typei [a] [ ]  aio [1]"));

    auto t = session("int", "mult [-1 b] [d]");
    auto o = find(t.enumerate_options(), "axi5b", {1});
    REQUIRE(o);
    CHECK(o->conclusion->name == "add");
    CHECK(o->conclusion->ins == TokenList{"b", "d"});
}

TEST_CASE("options of the empty derivation") {
    auto s = session("int", "");
    auto opts = s.enumerate_options();
    CHECK(has(opts, "lt [0 1] [ ]  ord4"));
    CHECK(has(opts, "lt [-1 0] [ ]  thm16"));
}

TEST_CASE("thm2 replays line by line") {
    auto th = testing::theory("int");
    auto script = testing::corpus("int", "thm2");
    Session s(th, script.premise);
    s.hidden = dependents_of("thm2", *th);
    s.hidden.insert("thm2");
    for (size_t k = script.premise.size(); k < script.lines.size(); ++k) {
        const auto& l = script.lines[k];
        auto opts = s.enumerate_options();
        CHECK_MESSAGE(find(opts, l.label, l.cl), "line ", l.number);
        auto& got = s.apply_option(testing::option_of(l));
        CHECK(got.stmt == l.stmt);
    }
    CHECK(s.lines.size() == 27);
}

TEST_CASE("clashing output names are renamed") {
    auto s = session("int", "add [a b] [c]");
    auto& l = s.apply_literal("add [b a] [c]");
    REQUIRE(l.stmt);
    CHECK(l.stmt->outs[0] != "c");
    CHECK(l.label == "axi2a");
}

TEST_CASE("fabricated statements are not options") {
    auto s = session("int", "add [a b] [c]");
    try {
        s.apply_literal("eqi [a b] [ ]");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == "NotAnOption");
    }
}

TEST_CASE("substitution options") {
    auto th = testing::theory("int");
    Session thm1 = session_from_script(th, testing::prefix(testing::corpus("int", "thm1"), 12));
    auto o = find(thm1.enumerate_options(), "sr1", {12, 7});
    REQUIRE(o);
    CHECK(o->conclusion->name == "add");
    CHECK(o->conclusion->ins == TokenList{"f", "a"});

    Session thm2 = session_from_script(th, testing::prefix(testing::corpus("int", "thm2"), 17));
    o = find(thm2.enumerate_options(), "sr2", {15, 10, 16});
    REQUIRE(o);
    CHECK(o->conclusion->name == "eqi");
    CHECK(o->conclusion->ins == TokenList{"l", "k"});
}

TEST_CASE("identity repetition in thm47") {
    auto th = testing::theory("vec");
    Session s = session_from_script(th, testing::prefix(testing::corpus("vec", "thm47"), 3));
    auto o = find(s.enumerate_options(), "sr1", {3, 2});
    REQUIRE(o);
    CHECK(o->conclusion->name == "lbx");
    s.apply_option(*o);
    auto& l = s.lines.back();
    o = find(s.enumerate_options(), "sr2", {3, 2, 4});
    REQUIRE(o);
    CHECK(o->conclusion->name == "eqv");
    CHECK(o->conclusion->ins == TokenList{l.stmt->outs[0], "a"});
}

TEST_CASE("splitting disjunctions") {
    auto s = session("int", "neq [a 0] [ ]\nmult [a a] [b]", {true, false});
    auto kids = s.split(1);
    REQUIRE(kids.size() == 2);
    CHECK(kids[0]->program()[0] == parse_statement("lt [a 0] [ ]"));
    CHECK(kids[1]->program()[0] == parse_statement("lt [0 a] [ ]"));

    auto a = session("int", "abs [a] [b]");
    auto ops = a.split(1);
    REQUIRE(ops.size() == 2);
    CHECK(ops[0]->program() == parse_program("lt [a 0] [ ]\nmult [-1 a] [b]"));
    CHECK(ops[1]->program() == parse_program("le [0 a] [ ]\nmult [1 a] [b]"));

    auto n = session("int", "add [a b] [c]");
    try {
        n.split(1);
        FAIL("split a plain statement");
    } catch (const Error& e) {
        CHECK(e.kind() == "NotADisjunction");
    }
}

TEST_CASE("contraction of thm17") {
    auto th = testing::theory("int");
    auto s = Session(th, parse_program("neq [a 0] [ ]\nmult [a a] [b]"), {true, false});
    s.hidden = {"thm17"};
    auto kids = s.split(1);
    CHECK_THROWS_AS(s.contract(1, "lem2", "lem1"), Error);
    for (auto& k : kids) k->status = SessionStatus::Concluded;
    auto& l = s.contract(1, "lem2", "lem1");
    CHECK(render_statement_or_false(l.stmt) == "lt [0 b] [ ]");
    CHECK(l.branches == std::vector<std::string>{"lem2", "lem1"});
    auto ex = extract_theorem(s.to_script(RuleKind::Theorem, "thm17"), check_proof(s.to_script(RuleKind::Theorem, "thm17"), s.context()));
    CHECK(render_rule(ex.rule) == render_rule(*th->rule("thm17")));
}

TEST_CASE("contraction with a false branch") {
    auto th = testing::theory("int");
    auto s = Session(th, parse_program("abs [a] [b]\neqi [b 0] [ ]"), {true, false});
    s.hidden = {"thm27"};
    auto& l = s.contract(1, "lem19", "lem20");
    CHECK(render_statement_or_false(l.stmt) == "eqi [a 0] [ ]");
}

TEST_CASE("both branches false") {
    auto s = session("int", "neq [a a] [ ]", {true});
    s.contract(1, "ord5", "ord5");
    CHECK(s.status == SessionStatus::False);
    CHECK_FALSE(s.lines.back().stmt);
}

TEST_CASE("falsity detection") {
    auto s = session("int", "lt [0 0] [ ]");
    auto f = s.detect_falsity();
    REQUIRE_FALSE(f.empty());
    CHECK(f[0].label == "ord5");

    auto t = session("int", "lt [a b] [ ]\nlt [b a] [ ]");
    auto o = find(t.enumerate_options(), "ord3", {1, 2});
    REQUIRE(o);
    t.apply_option(*o);
    CHECK(has(t.enumerate_options(), ":false  ord5 [3]"));
    CHECK_FALSE(t.detect_falsity().empty());

    auto thm1 = session("int", "add [a b] [c]\nmult [-1 b] [d]");
    CHECK(thm1.detect_falsity().empty());
}
