#include <doctest.h>

#include <algorithm>

#include "../support.hpp"
#include "pecr/theory.hpp"

using namespace pecr;
namespace fs = std::filesystem;

TEST_CASE("bundled int theory") {
    auto th = testing::theory("int");
    for (int i = 1; i <= 10; ++i) {
        std::string fam = "axi" + std::to_string(i);
        bool found = std::any_of(th->rules().begin(), th->rules().end(), [&](const RuleRecord& r) {
            return r.is_axiom() && r.label.rfind(fam, 0) == 0 && !std::isdigit((unsigned char)r.label[fam.size()]);
        });
        CHECK_MESSAGE(found, fam);
    }
    for (auto l : {"ord1a", "ord2a", "ord3", "ord4", "ord5", "ord6", "neq1", "neq2", "le1", "le2"}) {
        REQUIRE_MESSAGE(th->rule(l), l);
        CHECK(th->rule(l)->is_axiom());
    }
    for (auto d : {"neq", "le", "abs", "trich"}) CHECK_MESSAGE(th->disjunction(d), d);
    CHECK(th->disjunctions().size() == 4);
    for (auto c : {"-1", "0", "1", "pr"}) CHECK(th->constants().contains(c));
    CHECK(th->rule("ord5")->is_falsity());
}

TEST_CASE("bundled meta theory") {
    auto th = testing::theory("meta");
    std::set<std::string> atoms;
    for (auto& [n, a] : th->atoms()) atoms.insert(n);
    CHECK(atoms == std::set<std::string>{"typep", "eqp", "eqio", "sub", "conc", "disj", "ext", "false", "aext", "afalse"});
    for (auto l : {"per", "cr1", "cr2", "cr3a", "cr4a", "cr5a", "cr6a", "cr7a", "cr8a", "cr9a", "flse1", "flse2", "dsj1",
                   "dsj2a", "dsj3a", "dsj4a", "dsj5", "dsj6"})
        CHECK_MESSAGE(th->rule(l), l);
}

TEST_CASE("rule with an unbound conclusion input is rejected") {
    fs::path dir = fs::temp_directory_path() / "pecr_bad_theory";
    fs::remove_all(dir);
    fs::create_directories(dir / "bad");
    fs::copy_file(testing::theory_dir() / "int" / "manifest", dir / "bad" / "manifest");
    {
        std::string m = testing::slurp(dir / "bad" / "manifest");
        m.replace(m.find("theory int"), 10, "theory bad");
        std::ofstream(dir / "bad" / "manifest", std::ios::trunc) << m;
        std::ofstream(dir / "bad" / "axiom.dat") << "Axiom bad1.\n\ntypei [a] [ ]\n-------------\neqi [a z] [ ]\n";
    }
    CHECK_THROWS_AS(load_theory(dir, "bad"), Error);
    fs::remove_all(dir);
}

TEST_CASE("storing rules") {
    auto th = testing::theory("int");
    RuleRecord r = rule_from_script(testing::corpus("int", "thm1"), "int");
    r.label = "thm1x";
    th->store_rule(r);
    REQUIRE(th->rule("thm1x"));
    CHECK(th->rule("thm1x")->conclusion == r.conclusion);
    bool matched = false;
    match_premise(th->rule("thm1x")->premise, r.premise, th->constants(), [&](const Binding&, const std::vector<size_t>&) {
        matched = true;
        return false;
    });
    CHECK(matched);
    try {
        th->store_rule(r);
        FAIL("duplicate label accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == "DuplicateLabel");
    }
}

TEST_CASE("relabel an axiom as a theorem") {
    auto th = testing::theory("int");
    th->relabel("axi2b", RuleKind::Theorem, {"axi2a", "sr1"});
    CHECK(th->rule("axi2b")->kind == RuleKind::Theorem);
    CHECK(th->rule("axi2b")->tcl == TokenList{"axi2a", "sr1"});
}

TEST_CASE("rule rendering round trip") {
    auto th = testing::theory("vec");
    for (auto& r : th->rules()) {
        auto s = parse_single_script(render_rule(r));
        CHECK(s.label == r.label);
        CHECK(s.premise == r.premise);
        CHECK(s.conclusion == r.conclusion);
    }
}
