#include <doctest.h>

#include <algorithm>

#include "../support.hpp"
#include "pecr/kernel.hpp"

using namespace pecr;

namespace {

VerificationReport check(const Theory& th, const ProofScript& s) {
    auto reps = check_scripts({s}, th);
    return reps.front();
}

} // namespace

TEST_CASE("thm2 verifies with no redundancy") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "thm2");
    CHECK(s.lines.size() == 27);
    auto r = check(*th, s);
    CHECK(r.ok);
    CHECK(r.reduction.r.empty());
    REQUIRE(r.theorem);
}

TEST_CASE("thm34 verifies against stored theorems") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "thm34");
    CHECK(s.lines.size() == 21);
    for (auto l : {"thm25", "thm31", "thm32", "thm33"}) CHECK(th->rule(l));
    CHECK(check(*th, s).ok);
}

TEST_CASE("an altered connection list fails at its line") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "thm2");
    auto& l = s.lines[17];
    REQUIRE(l.label == "sr2");
    l.cl = {15, 10, 17};
    auto r = check(*th, s);
    CHECK_FALSE(r.ok);
    CHECK(r.first_failure() == 18);
}

TEST_CASE("connection-list reduction of lem3") {
    auto th = testing::theory("int");
    auto r = check(*th, testing::corpus("int", "lem3"));
    CHECK(r.ok);
    CHECK(r.reduction.support == std::vector<int>{1, 2});
    CHECK(r.reduction.r.empty());
}

TEST_CASE("an injected unused premise lands in r") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "thm2");
    Statement extra = parse_statement("typei [z] [ ]");
    s.premise.push_back(extra);
    ProofLine p;
    p.stmt = extra;
    s.lines.insert(s.lines.begin() + 3, p);
    for (size_t i = 0; i < s.lines.size(); ++i) {
        for (auto& c : s.lines[i].cl)
            if (c >= 4) ++c;
        s.lines[i].number = (int)i + 1;
    }
    auto r = check(*th, s);
    CHECK(r.ok);
    CHECK(r.reduction.r == std::vector<int>{4});
    CHECK(r.reduction.unused_premises == std::vector<int>{4});
    try {
        extract_theorem(s, r);
        FAIL("redundant script extracted");
    } catch (const Error& e) {
        CHECK(e.kind() == "RedundancyRefusal");
    }
    auto ex = extract_theorem(s, r, true);
    REQUIRE(ex.pruned);
    CHECK(ex.rule.premise.size() == 3);
}

TEST_CASE("theorem extraction") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "thm17");
    auto ex = extract_theorem(s, check(*th, s));
    CHECK(ex.rule.premise == parse_program("neq [a 0] [ ]\nmult [a a] [b]"));
    CHECK(ex.rule.conclusion == parse_statement("lt [0 b] [ ]"));
    CHECK(ex.rule.tcl == TokenList{"disj", "lem2", "lem1"});

    auto t = testing::corpus("int", "thm16");
    auto e16 = extract_theorem(t, check(*th, t));
    CHECK(e16.rule.premise.empty());
    CHECK(e16.rule.conclusion == parse_statement("lt [-1 0] [ ]"));
}

TEST_CASE("theorem connection lists reduce to axioms") {
    auto th = testing::theory("int");
    auto labels = reduce_theorem_connections("thm17", *th);
    for (auto l : {"ord2a", "ord2b", "sr1", "aio"}) CHECK_MESSAGE(labels.count(l), l);
    for (auto& l : labels) {
        if (is_automated_label(l)) continue;
        REQUIRE_MESSAGE(th->rule(l), l);
        CHECK_MESSAGE(th->rule(l)->is_axiom(), l);
    }
    CHECK(reduce_theorem_connections("axi2a", *th) == std::set<std::string>{"axi2a"});

    th->remove_rule("axi2a");
    try {
        reduce_theorem_connections("thm1", *th);
        FAIL("dangling label not reported");
    } catch (const Error& e) {
        CHECK(e.kind() == "DanglingLabel");
    }
}

TEST_CASE("dependents") {
    auto th = testing::theory("int");
    auto d = dependents_of("axi2a", *th);
    for (auto l : {"thm1", "thm2", "thm3"}) CHECK(d.count(l));
    CHECK(dependents_of("lem1", *th).count("thm17"));
    RuleRecord fresh;
    fresh.label = "axfresh";
    fresh.premise = parse_program("typei [a] [ ]");
    fresh.conclusion = parse_statement("eqi [a a] [ ]");
    th->store_rule(fresh);
    CHECK(dependents_of("axfresh", *th).empty());
}

TEST_CASE("citation order puts cited scripts first") {
    std::vector<ProofScript> ss = {testing::corpus("int", "thm17"), testing::corpus("int", "lem1"),
                                   testing::corpus("int", "lem2")};
    auto order = citation_order(ss);
    auto pos = [&](size_t i) { return std::find(order.begin(), order.end(), i) - order.begin(); };
    CHECK(pos(1) < pos(0));
    CHECK(pos(2) < pos(0));
}

TEST_CASE("premise mismatch and bad numbering are reported") {
    auto th = testing::theory("int");
    auto s = testing::corpus("int", "lem3");
    s.lines[2].number = 7;
    CHECK_FALSE(check(*th, s).ok);
    auto t = testing::corpus("int", "lem3");
    t.premise[0] = parse_statement("eqi [b a] [ ]");
    CHECK_FALSE(check(*th, t).ok);
}
