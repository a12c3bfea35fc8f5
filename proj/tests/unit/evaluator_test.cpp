#include <doctest.h>

#include "../support.hpp"
#include "pecr/evaluator.hpp"
#include "pecr/maps.hpp"

using namespace pecr;

namespace {

MachParams nint(int64_t n) {
    MachParams m;
    m.nint = n;
    return m;
}

Vec vec(std::vector<int64_t> v) { return Vec{std::move(v)}; }

} // namespace

TEST_CASE("bounded integer assignment") {
    auto th = testing::theory("int");
    Evaluator ev(*th, nint(100));
    auto r = ev.eval(parse_program("add [a b] [c]"), {{"a", Int{40}}, {"b", Int{2}}});
    REQUIRE(r.ok());
    CHECK(r.env.at("c") == Value(Int{42}));

    auto o = ev.eval(parse_program("add [a b] [c]"), {{"a", Int{70}}, {"b", Int{50}}});
    REQUIRE(o.error);
    CHECK(o.error->kind == "Overflow");
}

TEST_CASE("the associativity counterexample") {
    auto th = testing::theory("int");
    MachParams m = nint(1000);
    Evaluator ev(*th, m);
    auto r = ev.eval(th->rule("axi3a")->premise, {{"a", Int{-1000}}, {"b", Int{1000}}, {"c", Int{1}}});
    REQUIRE(r.error);
    CHECK(r.error->kind == "Overflow");
    CHECK(r.error->site == 2);
    CHECK(r.env.count("d"));
    CHECK(r.env.count("x"));
}

TEST_CASE("vector and box atoms") {
    auto th = testing::theory("vec");
    Evaluator ev(*th, MachParams{});
    auto a = ev.eval(parse_program("addv [a b] [c]"), {{"a", vec({1, 2})}, {"b", vec({3, 4})}});
    REQUIRE(a.ok());
    CHECK(a.env.at("c") == Value(vec({4, 6})));

    auto s = ev.eval(parse_program("smult [-1 a] [b]\naddv [a b] [c]\nzvec [a] [z]\neqv [c z] [ ]"), {{"a", vec({5, -7})}});
    REQUIRE(s.ok());
    CHECK(s.env.at("b") == Value(vec({-5, 7})));

    Box p{vec({0, 0}), vec({4, 4})};
    CHECK(ev.eval(parse_program("eltbx [v p] [ ]"), {{"v", vec({2, 3})}, {"p", p}}).ok());
    auto out = ev.eval(parse_program("eltbx [v p] [ ]"), {{"v", vec({5, 0})}, {"p", p}});
    REQUIRE(out.error);
    CHECK(out.error->kind == "RelationFailure");
}

TEST_CASE("iteration") {
    auto th = testing::theory("vec");
    Evaluator ev(*th, MachParams{});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::vector<int64_t> v(1 + rng() % 8);
        for (auto& x : v) x = (int64_t)(rng() % 2);
        CHECK(ev.iterf(vec(v), 0) == vec(v));
        int64_t n = (int64_t)(rng() % 30), m = (int64_t)(rng() % 30);
        CHECK(ev.iterf(vec(v), n + m) == ev.iterf(ev.iterf(vec(v), n), m));
    }
}

TEST_CASE("iteration reports the failing step") {
    auto th = testing::theory("vec");
    Evaluator ev(*th, nint(100));
    Map doubling;
    doubling.dim = 1;
    doubling.coords = {smul(2, var(0))};
    use_map(ev, doubling);
    auto r = ev.eval(parse_program("iterf [v n] [w]"), {{"v", vec({1})}, {"n", Int{7}}});
    REQUIRE(r.error);
    CHECK(r.error->kind == "Overflow");
    CHECK(r.error->detail.find("(step 7)") != std::string::npos);
    CHECK(ev.eval(parse_program("iterf [v n] [w]"), {{"v", vec({1})}, {"n", Int{6}}}).ok());
}

TEST_CASE("step budget") {
    auto th = testing::theory("vec");
    MachParams m;
    m.tcpu = 50;
    Evaluator ev(*th, m);
    auto r = ev.eval(parse_program("iterf [v n] [w]"), {{"v", vec({1, 0, 1})}, {"n", Int{1000}}});
    REQUIRE(r.error);
    CHECK(r.error->kind == "DeadlineExceeded");
}

TEST_CASE("value text round trip") {
    for (auto t : {"42", "-7", "[1 2 3]", "[[0 0] [4 4]]"}) CHECK(render_value(parse_value(t, false)) == t);
    CHECK(render_value(parse_value("-0.125", true)) == "-0.125");
    Env e = parse_env("a = 3\nb = [1 2]\n# note\n", false);
    CHECK(e.at("a") == Value(Int{3}));
    CHECK(e.at("b") == Value(vec({1, 2})));
}

TEST_CASE("disjunction statements evaluate their operands") {
    auto th = testing::theory("int");
    Evaluator ev(*th, MachParams{});
    CHECK(ev.eval(parse_program("neq [a b] [ ]"), {{"a", Int{1}}, {"b", Int{2}}}).ok());
    auto eq = ev.eval(parse_program("neq [a b] [ ]"), {{"a", Int{2}}, {"b", Int{2}}});
    CHECK_FALSE(eq.ok());
    auto ab = ev.eval(parse_program("abs [a] [b]"), {{"a", Int{-5}}});
    REQUIRE(ab.ok());
    CHECK(ab.env.at("b") == Value(Int{5}));
}
