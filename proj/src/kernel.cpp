#include "pecr/kernel.hpp"

#include <algorithm>
#include <functional>

namespace pecr {

int VerificationReport::first_failure() const {
    for (auto& l : lines)
        if (!l.ok) return l.number;
    return 0;
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (int x : v) out += (out.empty() ? "" : " ") + std::to_string(x);
    return out;
}

} // namespace

VerificationReport check_proof(const ProofScript& s, const Context& ctx) {
    const Theory& th = ctx.theory();
    VerificationReport rep;
    rep.label = s.label;
    auto script_error = [&](const std::string& msg) {
        rep.ok = false;
        rep.errors.push_back(msg);
    };
    if (!s.has_proof) {
        script_error("no Proof section");
        return rep;
    }
    auto known = th.atom_names();
    auto pv = validate_program(s.premise, th.constants(), &known);
    if (!pv.ok()) script_error("premise: " + pv.errors.front().str());
    if (s.premise.size() > (size_t)th.mach.nprem) script_error("premise longer than nprem");

    size_t np = 0;
    while (np < s.lines.size() && s.lines[np].is_premise()) ++np;
    rep.supports.assign(s.lines.size(), {});
    for (size_t k = 0; k < s.lines.size(); ++k) {
        const auto& l = s.lines[k];
        LineReport lr;
        lr.number = l.number;
        if (l.number != (int)k + 1) {
            lr.ok = false;
            lr.kind = "BadNumbering";
            lr.message = "expected line " + std::to_string(k + 1);
        } else if (k < np) {
            if (k >= s.premise.size() || !l.stmt || !(*l.stmt == s.premise[k])) {
                lr.ok = false;
                lr.kind = "PremiseMismatch";
                lr.message = "premise line differs from the stated premise";
            }
        } else {
            auto v = verify_line(ctx, s.lines, k);
            lr.ok = v.ok;
            lr.kind = v.kind;
            lr.message = v.message;
            rep.supports[k] = v.support;
        }
        if (!lr.ok) rep.ok = false;
        rep.lines.push_back(lr);
    }
    if (np != s.premise.size()) script_error("proof lists " + std::to_string(np) + " premise lines, block has " + std::to_string(s.premise.size()));
    if (s.lines.empty()) {
        script_error("empty proof");
    } else {
        const auto& last = s.lines.back();
        if (s.lines.size() == np) script_error("no derived lines");
        if (last.stmt != s.conclusion) script_error("final line is not the stated conclusion");
    }
    if (!rep.ok) return rep;
    rep.reduction = reduce_connections(s, rep.supports);
    if (rep.reduction.r.empty()) {
        RuleRecord r = rule_from_script(s, th.name);
        rep.theorem = r;
    }
    return rep;
}

ClReduction reduce_connections(const ProofScript& s, const std::vector<std::vector<int>>& supports) {
    ClReduction out;
    size_t m = s.lines.size();
    if (m == 0) return out;
    auto cl_of = [&](size_t i) -> std::vector<int> {  // 1-based i
        if (s.lines[i - 1].is_premise()) return {};
        if (i - 1 < supports.size() && !supports[i - 1].empty()) return supports[i - 1];
        return s.lines[i - 1].cl;
    };
    std::vector<int> b = cl_of(m);
    std::vector<int> r;
    for (size_t i = m - 1; i >= 1; --i) {
        auto it = std::find(b.begin(), b.end(), (int)i);
        if (it != b.end() && !s.lines[i - 1].is_premise()) {
            b.erase(it);
            for (int c : cl_of(i))
                if (std::find(b.begin(), b.end(), c) == b.end()) b.push_back(c);
        } else if (it == b.end()) {
            r.push_back((int)i);
        }
    }
    std::sort(b.begin(), b.end());
    out.support = b;
    for (int x : r)
        if (std::find(b.begin(), b.end(), x) == b.end()) out.r.push_back(x);
    std::sort(out.r.begin(), out.r.end());
    for (int x : out.r) (s.lines[x - 1].is_premise() ? out.unused_premises : out.unreachable_lines).push_back(x);
    return out;
}

std::vector<size_t> citation_order(const std::vector<ProofScript>& scripts) {
    std::map<std::string, size_t> by_label;
    for (size_t i = 0; i < scripts.size(); ++i) by_label.emplace(scripts[i].label, i);
    std::vector<int> state(scripts.size(), 0);  // 0 new, 1 on stack, 2 placed
    std::vector<size_t> order;
    std::function<void(size_t)> place = [&](size_t i) {
        if (state[i]) return;  // a cycle falls back to input order
        state[i] = 1;
        for (auto& l : tcl_of(scripts[i]))
            if (auto it = by_label.find(l); it != by_label.end() && it->second != i) place(it->second);
        state[i] = 2;
        order.push_back(i);
    };
    for (size_t i = 0; i < scripts.size(); ++i) place(i);
    return order;
}

std::vector<VerificationReport> check_scripts(const std::vector<ProofScript>& scripts, const Theory& th) {
    std::vector<RuleRecord> extra;
    std::vector<VerificationReport> out(scripts.size());
    for (size_t idx : citation_order(scripts)) {
        const ProofScript& s = scripts[idx];
        std::set<std::string> hidden = dependents_of(s.label, th);
        hidden.insert(s.label);
        std::vector<RuleRecord> visible;
        for (auto& r : extra)
            if (!hidden.count(r.label)) visible.push_back(r);
        // stored rules with the label of an earlier script are shadowed by it
        Context ctx(th, visible, hidden);
        auto rep = check_proof(s, ctx);
        if (rep.ok) {
            RuleRecord r = rule_from_script(s, th.name);
            std::erase_if(extra, [&](const RuleRecord& e) { return e.label == r.label; });
            extra.insert(extra.begin(), r);
        }
        out[idx] = std::move(rep);
    }
    return out;
}

Extraction extract_theorem(const ProofScript& s, const VerificationReport& rep, bool force) {
    if (!rep.ok) throw Error("NotAProof", s.label + " failed verification");
    const auto& red = rep.reduction;
    Extraction ex;
    if (red.r.empty()) {
        ex.rule = rule_from_script(s, "");
        return ex;
    }
    if (!force) throw Error("RedundancyRefusal", "redundant lines [" + join_ints(red.r) + "]");
    std::set<int> drop(red.r.begin(), red.r.end());
    ProofScript p = s;
    p.lines.clear();
    p.premise.clear();
    int next = 1;
    for (auto& l : s.lines)
        if (!drop.count(l.number)) ex.remap[l.number] = next++;
    for (size_t k = 0; k < s.lines.size(); ++k) {
        const auto& l = s.lines[k];
        if (drop.count(l.number)) continue;
        ProofLine n = l;
        n.number = ex.remap[l.number];
        for (auto& c : n.cl) c = ex.remap.at(c);
        if (n.is_premise()) p.premise.push_back(*n.stmt);
        p.lines.push_back(n);
    }
    ex.rule = rule_from_script(p, "");
    ex.pruned = p;
    return ex;
}

std::set<std::string> reduce_theorem_connections(const std::string& label, const Theory& th) {
    std::set<std::string> out;
    std::set<std::string> done;
    std::vector<std::string> path;
    std::function<void(const std::string&)> visit = [&](const std::string& l) {
        if (is_automated_label(l)) {
            out.insert(l);
            return;
        }
        const RuleRecord* r = th.rule(l);
        if (!r) throw Error("DanglingLabel", l + (path.empty() ? "" : " cited by " + path.back()));
        if (r->is_axiom()) {
            out.insert(l);
            return;
        }
        if (std::find(path.begin(), path.end(), l) != path.end()) throw Error("Cycle", "through " + l);
        if (done.count(l)) return;
        path.push_back(l);
        for (auto& c : r->tcl) visit(c);
        path.pop_back();
        done.insert(l);
    };
    visit(label);
    return out;
}

std::set<std::string> dependents_of(const std::string& label, const Theory& th) {
    std::map<std::string, std::vector<std::string>> users;
    for (auto& r : th.rules())
        for (auto& c : r.tcl) users[c].push_back(r.label);
    std::set<std::string> out;
    std::vector<std::string> stack{label};
    while (!stack.empty()) {
        std::string l = stack.back();
        stack.pop_back();
        for (auto& u : users[l])
            if (u != label && out.insert(u).second) stack.push_back(u);
    }
    return out;
}

Session session_from_script(std::shared_ptr<const Theory> th, const ProofScript& s) {
    std::vector<bool> stars;
    for (auto& l : s.lines)
        if (l.is_premise()) stars.push_back(l.star);
    Session se(th, s.premise, stars);
    se.hidden = dependents_of(s.label, *th);
    se.hidden.insert(s.label);
    for (auto& l : s.lines) {
        if (l.is_premise()) continue;
        se.lines.push_back(l);
        auto v = verify_line(se.context(), se.lines, se.lines.size() - 1);
        if (!v.ok) throw Error("VerificationFailure", "line " + std::to_string(l.number) + " " + v.kind + ": " + v.message);
        if (!l.stmt) se.status = SessionStatus::False;
    }
    return se;
}

} // namespace pecr
