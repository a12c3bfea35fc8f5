// One PASS/FAIL line per acceptance criterion; exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "../support.hpp"
#include "pecr/foundry.hpp"
#include "pecr/maps.hpp"

using namespace pecr;
using Clock = std::chrono::steady_clock;

namespace {

const std::vector<std::string> kTheories = {"int", "vec", "meta", "sets"};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool ok = true;
    std::string note;
    void fail(const std::string& why) {
        if (ok) note = why;
        ok = false;
    }
};

std::string normalize(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace((unsigned char)c)) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

// 1. every corpus proof verifies with r empty
Outcome corpus_verification() {
    Outcome o;
    auto t0 = Clock::now();
    size_t n = 0;
    for (auto& t : kTheories) {
        auto th = testing::theory(t);
        auto scripts = testing::corpus_all(t);
        auto reps = check_scripts(scripts, *th);
        for (auto& r : reps) {
            ++n;
            if (!r.ok) o.fail(t + "/" + r.label + " fails at line " + std::to_string(r.first_failure()));
            else if (!r.reduction.r.empty()) o.fail(t + "/" + r.label + " has redundant lines");
        }
    }
    double dt = seconds_since(t0);
    if (n != 110) o.fail("expected 110 proofs, found " + std::to_string(n));
    if (dt >= 60) o.fail("took " + std::to_string(dt) + " s");
    if (o.ok) o.note = std::to_string(n) + " proofs, " + std::to_string(dt) + " s";
    return o;
}

// 2. extracted blocks equal the stated blocks
Outcome extraction_fidelity() {
    Outcome o;
    size_t n = 0;
    for (auto& t : kTheories) {
        auto th = testing::theory(t);
        auto scripts = testing::corpus_all(t);
        auto reps = check_scripts(scripts, *th);
        auto labels = testing::corpus_order(t);
        for (size_t i = 0; i < scripts.size(); ++i) {
            std::string text = testing::slurp(testing::root() / "corpus" / t / (labels[i] + ".prf"));
            std::string stated = text.substr(0, text.find("Proof."));
            try {
                auto ex = extract_theorem(scripts[i], reps[i]);
                if (normalize(render_rule(ex.rule)) != normalize(stated)) o.fail(t + "/" + labels[i] + " block differs");
                else ++n;
            } catch (const Error& e) {
                o.fail(t + "/" + labels[i] + ": " + e.what());
            }
        }
    }
    if (o.ok) o.note = std::to_string(n) + " blocks identical";
    return o;
}

// 3. every justified line is among the options at its step
Outcome options_completeness() {
    Outcome o;
    size_t hits = 0, total = 0;
    for (auto& t : kTheories) {
        auto th = testing::theory(t);
        std::vector<RuleRecord> verified;
        auto scripts = testing::corpus_all(t);
        for (size_t i : citation_order(scripts)) {
            const auto& s = scripts[i];
            std::vector<bool> stars;
            for (auto& l : s.lines)
                if (l.is_premise()) stars.push_back(l.star);
            Session se(th, s.premise, stars);
            se.hidden = dependents_of(s.label, *th);
            se.hidden.insert(s.label);
            for (auto& r : verified)
                if (!se.hidden.count(r.label)) se.extra.push_back(r);
            for (auto& l : s.lines) {
                if (l.is_premise()) continue;
                auto opts = se.enumerate_options();
                auto want = l.cl;
                std::sort(want.begin(), want.end());
                bool hit = std::any_of(opts.begin(), opts.end(), [&](const Option& op) {
                    if (op.label != l.label || op.shape() != shape_of(l.stmt)) return false;
                    if (l.label == "disj") return op.branches == l.branches;
                    auto c = op.cl;
                    std::sort(c.begin(), c.end());
                    return c == want;
                });
                ++total;
                if (hit) ++hits;
                else o.fail(t + "/" + s.label + " line " + std::to_string(l.number) + " missing");
                se.lines.push_back(l);
            }
            auto r = rule_from_script(s, t);
            std::erase_if(verified, [&](const RuleRecord& e) { return e.label == r.label; });
            verified.insert(verified.begin(), r);
        }
    }
    if (o.ok) o.note = std::to_string(hits) + "/" + std::to_string(total) + " lines found";
    return o;
}

// copy of s with an unused premise inserted after the stated premises
ProofScript inject_premise(ProofScript s, const Statement& extra) {
    int at = (int)s.premise.size() + 1;
    s.premise.push_back(extra);
    ProofLine p;
    p.stmt = extra;
    s.lines.insert(s.lines.begin() + (at - 1), p);
    for (size_t i = 0; i < s.lines.size(); ++i) {
        s.lines[i].number = (int)i + 1;
        for (auto& c : s.lines[i].cl)
            if (c >= at) ++c;
    }
    return s;
}

// a type check on a token no proof uses
std::optional<Statement> unused_premise(const Theory& th) {
    for (auto& [name, ty] : th.types()) {
        if (ty.check_atom.empty()) continue;
        auto* a = th.atom(ty.check_atom);
        if (!a || a->in_types.size() != 1 || !a->out_types.empty()) continue;
        return Statement{ty.check_atom, {"zz"}, {}};
    }
    return std::nullopt;
}

// 4. algclr on all proofs, injection, and algtclr of thm17
Outcome connection_lists() {
    Outcome o;
    size_t injected = 0;
    for (auto& t : kTheories) {
        auto th = testing::theory(t);
        auto scripts = testing::corpus_all(t);
        auto reps = check_scripts(scripts, *th);
        for (size_t i = 0; i < scripts.size(); ++i) {
            if (!reps[i].reduction.r.empty()) o.fail(t + "/" + scripts[i].label + " r not empty");
            auto extra = unused_premise(*th);
            if (!extra) {
                o.fail(t + ": no check atom for injection");
                continue;
            }
            if ((int64_t)scripts[i].premise.size() + 1 > th->mach.nprem) continue;
            auto mutated = inject_premise(scripts[i], *extra);
            std::vector<ProofScript> set = scripts;
            set[i] = mutated;
            auto rep = check_scripts(set, *th)[i];
            int label = (int)scripts[i].premise.size() + 1;
            if (!rep.ok) o.fail(t + "/" + scripts[i].label + " injected copy fails");
            else if (rep.reduction.r != std::vector<int>{label})
                o.fail(t + "/" + scripts[i].label + " injected premise not isolated in r");
            else ++injected;
        }
    }
    auto th = testing::theory("int");
    auto labels = reduce_theorem_connections("thm17", *th);
    for (auto& l : labels)
        if (!is_automated_label(l) && (!th->rule(l) || !th->rule(l)->is_axiom())) o.fail("thm17 reduces to " + l);
    if (o.ok) o.note = std::to_string(injected) + " injections isolated; thm17 rests on " + std::to_string(labels.size()) + " labels";
    return o;
}

RuleRecord rule(const std::string& label, const std::string& premise, const std::string& conclusion) {
    RuleRecord r;
    r.label = label;
    r.premise = parse_program(premise);
    r.conclusion = parse_statement(conclusion);
    return r;
}

// 5. soundness sweep, mutants, deterministic replay
Outcome soundness_sweep() {
    Outcome o;
    MachParams m;
    m.nint = 1000;
    size_t swept = 0;
    auto vec = testing::theory("vec", m);  // includes int
    for (auto& r : vec->rules()) {
        if (!r.is_axiom()) continue;
        try {
            auto v = soundness_sample(r, *vec, 1000, m, 20240501);
            if (v.violation()) o.fail(v.str());
            ++swept;
        } catch (const Error& e) {
            o.fail(r.label + ": " + e.what());
        }
    }
    std::vector<std::pair<std::string, RuleRecord>> mutants = {
        {"int", rule("m_ord1a", "lt [a b] [ ]\nadd [a c] [x]\nadd [b c] [y]", "lt [y x] [ ]")},
        {"int", rule("m_ord2a", "lt [a b] [ ]\nlt [0 c] [ ]\nmult [a c] [x]\nmult [b c] [y]", "lt [y x] [ ]")},
        {"int", rule("m_ord2b", "lt [a b] [ ]\nlt [c 0] [ ]\nmult [a c] [x]\nmult [b c] [y]", "lt [x y] [ ]")},
        {"int", rule("m_ord3", "lt [a b] [ ]\nlt [b c] [ ]", "lt [c a] [ ]")},
        {"int", rule("m_le1", "lt [a b] [ ]", "le [b a] [ ]")},
        {"int", rule("m_axi10b", "mult [a b] [c]\ndiv [c a] [d]", "eqi [d a] [ ]")},
        {"int", rule("m_axi9c", "add [b c] [d]\nmult [a d] [x]\nmult [a b] [u]\nmult [a c] [v]\nadd [u v] [y]", "eqi [y u] [ ]")},
        {"vec", rule("m_lev1a", "ltv [a b] [ ]", "lev [b a] [ ]")},
        {"vec", rule("m_bx3a", "lbx [p] [a]\neltbx [v p] [ ]", "lev [v a] [ ]")},
        {"vec", rule("m_axv8c", "mult [r s] [t]\nsmult [t a] [b]\nsmult [s a] [c]\nsmult [r c] [d]", "eqv [d c] [ ]")},
    };
    size_t caught = 0;
    for (auto& [t, r] : mutants) {
        auto th = testing::theory(t, m);
        auto v = soundness_sample(r, *th, 1000, m, 20240501);
        if (!v.violation()) {
            o.fail(r.label + " survived 1000 samples");
            continue;
        }
        auto again = soundness_sample(r, *th, 1000, m, 20240501);
        auto rep = replay(r, *th, *v.counterexample, m);
        if (!again.counterexample || render_env(*again.counterexample) != render_env(*v.counterexample))
            o.fail(r.label + " counterexample differs between runs");
        else if (!rep || rep->str() != v.error->str())
            o.fail(r.label + " counterexample does not replay");
        else ++caught;
    }
    if (o.ok) o.note = std::to_string(swept) + " axioms clean; " + std::to_string(caught) + "/10 mutants caught and replayed";
    return o;
}

// 6. enclosure on random maps and subdistributivity
Outcome enclosure() {
    Outcome o;
    std::mt19937_64 rng(77);
    const int64_t nint = 1000000;
    int maps = 0;
    while (maps < 100) {
        size_t dim = 1 + rng() % 3;
        Map f = random_map(rng, dim, 1 + (int)(rng() % 3));
        Box p;
        uint64_t points = 1;
        for (size_t i = 0; i < dim; ++i) {
            int64_t lo = (int64_t)(rng() % 21) - 10;
            int64_t w = (int64_t)(rng() % 21);
            p.lo.v.push_back(lo);
            p.hi.v.push_back(lo + w);
            points *= (uint64_t)(w + 1);
        }
        if (points > 10000) continue;
        ++maps;
        try {
            Box r = range_oracle([&](const Vec& v) { return f.apply(v, nint); }, p, 10000);
            Box b = f.boundf(p, nint);
            if (!box_within(r, b)) o.fail("range escapes boundf for " + f.str());
        } catch (const ExecFailure& e) {
            o.fail("map " + f.str() + ": " + e.kind);
        }
    }
    int triples = 0;
    auto interval = [&] {
        int64_t lo = (int64_t)(rng() % 41) - 20;
        return Interval{lo, lo + (int64_t)(rng() % 21)};
    };
    for (; triples < 1000; ++triples) {
        Interval r = interval(), p = interval(), q = interval();
        Interval lhs = imul(r, iadd(p, q, nint), nint);
        Interval rhs = iadd(imul(r, p, nint), imul(r, q, nint), nint);
        if (!lhs.within(rhs)) o.fail("subdistributivity fails");
    }
    if (o.ok) o.note = std::to_string(maps) + " maps enclosed, " + std::to_string(triples) + " triples";
    return o;
}

// 7. automaton certification, long runs, semigroup law
Outcome certification() {
    Outcome o;
    auto th = testing::theory("vec");
    MachParams m;
    m.tcpu = 100000000;
    std::mt19937_64 rng(4242);
    auto random_state = [&](size_t cells) {
        Vec v;
        for (size_t i = 0; i < cells; ++i) v.v.push_back((int64_t)(rng() % 2));
        return v;
    };
    int certs = 0;
    for (size_t cells = 1; cells <= 12; ++cells) {
        Evaluator ev(*th, m);
        try {
            auto c = certify_axc5(ev, binary_cube(cells), random_state(cells), 1000);
            if (!verify_certificate(c)) o.fail("certificate digest mismatch");
            else ++certs;
        } catch (const Error& e) {
            o.fail(std::to_string(cells) + " cells: " + e.what());
        }
    }
    int runs = 0;
    for (; runs < 100; ++runs) {
        size_t cells = 1 + rng() % 12;
        Evaluator ev(*th, m);
        auto r = ev.eval(parse_program("iterf [v n] [w]"), {{"v", random_state(cells)}, {"n", Int{10000}}});
        if (!r.ok()) o.fail("iterf: " + r.error->str());
    }
    int laws = 0;
    for (; laws < 1000; ++laws) {
        size_t cells = 1 + rng() % 12;
        Evaluator ev(*th, m);
        Vec v = random_state(cells);
        int64_t n = (int64_t)(rng() % 200), k = (int64_t)(rng() % 200);
        if (ev.iterf(v, n + k) != ev.iterf(ev.iterf(v, n), k)) o.fail("semigroup law fails");
    }
    if (o.ok)
        o.note = std::to_string(certs) + " certificates, " + std::to_string(runs) + " runs of 10^4 steps, " +
                 std::to_string(laws) + " law samples";
    return o;
}

// 8. purge against an independent graph walk, and search
Outcome foundry() {
    Outcome o;
    auto th = testing::theory("int");
    std::map<std::string, std::set<std::string>> cited_by;
    for (auto& r : th->rules())
        for (auto& c : r.tcl) cited_by[c].insert(r.label);
    std::set<std::string> reach = {"axi2a"};
    std::vector<std::string> todo = {"axi2a"};
    while (!todo.empty()) {
        std::string l = todo.back();
        todo.pop_back();
        for (auto& d : cited_by[l])
            if (reach.insert(d).second) todo.push_back(d);
    }
    auto gone = purge("axi2a", *th);
    std::set<std::string> got(gone.begin(), gone.end());
    if (got != reach) o.fail("purge removed " + std::to_string(got.size()) + ", walk found " + std::to_string(reach.size()));

    MachParams m;
    m.nint = 1000;
    SearchCaps caps;
    caps.samples = 200;
    auto t0 = Clock::now();
    auto res = search_axioms(*th, {"add", "eqi", "typei"}, 2, m, 7, caps);
    RuleRecord comm = rule("comm", "add [a b] [c]", "add [b a] [d]");
    bool found = std::any_of(res.survivors.begin(), res.survivors.end(),
                             [&](const RuleRecord& r) { return rules_equivalent(r, comm, th->constants()); });
    if (!found) o.fail("commutativity not among " + std::to_string(res.survivors.size()) + " survivors");
    if (o.ok)
        o.note = "purged " + std::to_string(got.size()) + " labels; search kept " + std::to_string(res.survivors.size()) +
                 " of " + std::to_string(res.enumerated) + " candidates in " + std::to_string(seconds_since(t0)) + " s";
    return o;
}

} // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"corpus verification", corpus_verification},
        {"extraction fidelity", extraction_fidelity},
        {"options completeness", options_completeness},
        {"connection-list algorithms", connection_lists},
        {"evaluator soundness sweep", soundness_sweep},
        {"enclosure property", enclosure},
        {"computability certification", certification},
        {"foundry purge and search", foundry},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.ok) ++failed;
        std::cout << (o.ok ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.note << std::endl;
    }
    return failed ? 1 : 0;
}
