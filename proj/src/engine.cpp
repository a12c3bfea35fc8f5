#include "pecr/engine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace pecr {

Context::Context(const Theory& th, const std::vector<RuleRecord>& extra, const std::set<std::string>& hidden) : th_(th) {
    auto add = [&](const RuleRecord& r) {
        if (hidden.count(r.label)) return;
        auto [it, fresh] = index_.emplace(r.label, &r);
        if (fresh) rules_.push_back(&r);
    };
    for (auto& r : extra) add(r);
    for (auto& r : th.rules()) add(r);
}

const RuleRecord* Context::find(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? nullptr : it->second;
}

std::string shape_of(const std::optional<Statement>& s) {
    if (!s) return ":false";
    std::string out = s->name + " [";
    for (size_t k = 0; k < s->ins.size(); ++k) out += (k ? " " : "") + s->ins[k];
    return out + "] " + std::to_string(s->outs.size());
}

std::string Option::shape() const { return shape_of(conclusion); }

std::string Option::render() const {
    std::string st = render_statement_or_false(conclusion);
    std::string out = st + "  " + label;
    if (!branches.empty()) {
        out += " [";
        for (size_t k = 0; k < branches.size(); ++k) out += (k ? " " : "") + branches[k];
        out += "]";
    } else if (!cl.empty()) {
        out += " [";
        for (size_t k = 0; k < cl.size(); ++k) out += (k ? " " : "") + std::to_string(cl[k]);
        out += "]";
    }
    return out;
}

std::string Option::hash() const {
    // FNV-1a over the rendered option
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : render()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

FreshNames::FreshNames(const Program& used, const ConstSet& cst) : cst_(cst) {
    for (auto& t : io_names(used)) used_.insert(t);
}

std::string FreshNames::next() {
    while (true) {
        size_t k = counter_++;
        std::string n(1, char('a' + k % 26));
        if (k >= 26) n += std::to_string(k / 26);
        if (!used_.count(n) && !cst_.contains(n)) {
            used_.insert(n);
            return n;
        }
    }
}

Program statements_of(const std::vector<ProofLine>& lines) {
    Program p;
    for (auto& l : lines)
        if (l.stmt) p.push_back(*l.stmt);
    return p;
}

namespace {

std::vector<int> one_based(const std::vector<size_t>& v) {
    std::vector<int> out;
    for (size_t x : v) out.push_back((int)x + 1);
    return out;
}

Statement with_fresh_outputs(Statement s, FreshNames& f) {
    for (auto& o : s.outs) o = f.next();
    return s;
}

// sr1 from line i through equality line j
void sr1_pair(const Theory& th, const Program& d, size_t i, size_t j, const FreshNames& base, std::vector<Option>& out) {
    const auto& p = d[i];
    const auto& e = d[j];
    auto* sig = th.atom(p.name);
    if (!sig || !sig->substitutable || !th.is_eq_atom(e.name) || e.ins.size() != 2) return;
    std::string te = th.position_type(e.name, 0, false);
    for (size_t k = 0; k < p.ins.size(); ++k) {
        if (p.ins[k] != e.ins[0]) continue;
        std::string tk = th.position_type(p.name, k, false);
        if (tk.empty() || tk != te || th.eq_atom_for(tk) != e.name) continue;
        Statement s = p;
        s.ins[k] = e.ins[1];
        FreshNames f = base;
        Option o;
        o.conclusion = with_fresh_outputs(s, f);
        o.label = "sr1";
        o.cl = {(int)i + 1, (int)j + 1};
        o.prov = Provenance::Sr1;
        out.push_back(std::move(o));
    }
}

// sr2 from line i, equality line j and the substituted instance l
void sr2_triple(const Theory& th, const Program& d, size_t i, size_t j, size_t l, const FreshNames& base,
                std::vector<Option>& out) {
    const auto& p = d[i];
    const auto& e = d[j];
    const auto& q = d[l];
    auto* sig = th.atom(p.name);
    if (!sig || !sig->substitutable || !th.is_eq_atom(e.name) || e.ins.size() != 2) return;
    if (q.name != p.name || q.ins.size() != p.ins.size() || q.outs.size() != p.outs.size()) return;
    std::string te = th.position_type(e.name, 0, false);
    bool any = false;
    for (size_t k = 0; k < p.ins.size() && !any; ++k) {
        if (p.ins[k] != e.ins[0]) continue;
        std::string tk = th.position_type(p.name, k, false);
        if (tk.empty() || tk != te || th.eq_atom_for(tk) != e.name) continue;
        TokenList x = p.ins;
        x[k] = e.ins[1];
        any = x == q.ins;
    }
    if (!any) return;
    for (size_t jj = 0; jj < p.outs.size(); ++jj) {
        std::string ty = th.position_type(p.name, jj, true);
        std::string eq = th.eq_atom_for(ty);
        auto* esig = th.atom(eq);
        if (!esig) continue;
        Statement s{eq, {q.outs[jj], p.outs[jj]}, {}};
        s.outs.resize(esig->out_types.size());
        FreshNames f = base;
        Option o;
        o.conclusion = with_fresh_outputs(s, f);
        o.label = "sr2";
        o.cl = {(int)i + 1, (int)j + 1, (int)l + 1};
        o.prov = Provenance::Sr2;
        out.push_back(std::move(o));
    }
}

void dedupe(std::vector<Option>& v) {
    std::set<std::string> seen;
    std::vector<Option> out;
    for (auto& o : v)
        if (seen.insert(o.render()).second) out.push_back(std::move(o));
    v = std::move(out);
}

} // namespace

std::vector<Option> rule_options(const Context& ctx, const Program& d, const RuleRecord& r) {
    const Theory& th = ctx.theory();
    FreshNames base(d, th.constants());
    std::vector<Option> out;
    std::set<std::string> seen;
    match_premise(r.premise, d, th.constants(), [&](const Binding& b, const std::vector<size_t>& chosen) {
        Option o;
        o.label = r.label;
        o.cl = one_based(chosen);
        if (r.is_falsity()) {
            o.prov = Provenance::Falsity;
        } else {
            Binding bb = b;
            FreshNames f = base;
            for (auto& y : r.conclusion->outs) bb[y] = f.next();
            o.conclusion = apply_binding(*r.conclusion, bb);
            o.prov = Provenance::Rule;
        }
        if (seen.insert(o.render()).second) out.push_back(std::move(o));
        return true;
    });
    return out;
}

std::vector<Option> aio_options(const Theory& th, const Program& d, const std::vector<size_t>* only) {
    std::vector<Option> out;
    auto one = [&](size_t l) {
        const auto& s = d[l];
        auto emit = [&](const std::string& tok, const std::string& ty) {
            std::string c = th.check_atom_for(ty);
            if (c.empty()) return;
            Option o;
            o.conclusion = Statement{c, {tok}, {}};
            o.label = "aio";
            o.cl = {(int)l + 1};
            o.prov = Provenance::Aio;
            out.push_back(std::move(o));
        };
        for (size_t k = 0; k < s.ins.size(); ++k) emit(s.ins[k], th.position_type(s.name, k, false));
        for (size_t k = 0; k < s.outs.size(); ++k) emit(s.outs[k], th.position_type(s.name, k, true));
    };
    if (only) {
        for (size_t l : *only)
            if (l < d.size()) one(l);
    } else {
        for (size_t l = 0; l < d.size(); ++l) one(l);
    }
    dedupe(out);
    return out;
}

std::vector<Option> sr1_options(const Theory& th, const Program& d) {
    FreshNames base(d, th.constants());
    std::vector<Option> out;
    for (size_t j = 0; j < d.size(); ++j) {
        if (!th.is_eq_atom(d[j].name)) continue;
        for (size_t i = 0; i < d.size(); ++i) sr1_pair(th, d, i, j, base, out);
    }
    return out;
}

std::vector<Option> sr2_options(const Theory& th, const Program& d) {
    FreshNames base(d, th.constants());
    std::vector<Option> out;
    for (size_t j = 0; j < d.size(); ++j) {
        if (!th.is_eq_atom(d[j].name)) continue;
        for (size_t i = 0; i < d.size(); ++i) {
            if (d[i].ins.empty() || std::find(d[i].ins.begin(), d[i].ins.end(), d[j].ins[0]) == d[i].ins.end()) continue;
            for (size_t l = 0; l < d.size(); ++l)
                if (d[l].name == d[i].name) sr2_triple(th, d, i, j, l, base, out);
        }
    }
    return out;
}

std::vector<Option> one_step(const Context& ctx, const Program& d, const std::string& label) {
    const Theory& th = ctx.theory();
    if (label == "aio") return aio_options(th, d);
    if (label == "sr1") return sr1_options(th, d);
    if (label == "sr2") return sr2_options(th, d);
    if (!label.empty()) {
        auto* r = ctx.find(label);
        if (!r) throw Error("UnknownLabel", label);
        return rule_options(ctx, d, *r);
    }
    std::vector<Option> out;
    for (auto* r : ctx.rules()) {
        auto v = rule_options(ctx, d, *r);
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    }
    for (auto* f : {&aio_options}) {
        auto v = (*f)(th, d, nullptr);
        out.insert(out.end(), v.begin(), v.end());
    }
    for (auto& v : {sr1_options(th, d), sr2_options(th, d)}) out.insert(out.end(), v.begin(), v.end());
    return out;
}

namespace {

struct Spliced {
    Program d;
    size_t at = 0, len = 0;
    int back(int one_based_line) const {  // operand numbering -> outer numbering
        size_t i = (size_t)one_based_line - 1;
        if (i < at) return (int)i + 1;
        if (i < at + len) return (int)at + 1;
        return (int)(i - len + 1) + 1;
    }
};

std::vector<Spliced> splice_operands(const Theory& th, const Program& d, size_t s, FreshNames& fresh) {
    std::vector<Spliced> out;
    for (auto& op : th.operands_of(d[s], [&] { return fresh.next(); })) {
        Spliced sp;
        sp.at = s;
        sp.len = op.size();
        sp.d.insert(sp.d.end(), d.begin(), d.begin() + s);
        sp.d.insert(sp.d.end(), op.begin(), op.end());
        sp.d.insert(sp.d.end(), d.begin() + s + 1, d.end());
        out.push_back(std::move(sp));
    }
    return out;
}

bool names_available(const Statement& s, const Program& d, const ConstSet& cst) {
    TokenList names = io_names(d);
    for (auto& x : s.ins)
        if (!cst.contains(x) && std::find(names.begin(), names.end(), x) == names.end()) return false;
    return true;
}

struct BranchOptions {
    std::vector<Option> falses;
    std::map<std::string, std::vector<Option>> by_shape;
};

BranchOptions collect(const std::vector<Option>& opts, const Program& outer, const ConstSet& cst) {
    BranchOptions b;
    for (auto& o : opts) {
        if (!o.conclusion) b.falses.push_back(o);
        else if (names_available(*o.conclusion, outer, cst)) b.by_shape[o.shape()].push_back(o);
    }
    return b;
}

std::vector<int> merge_support(const std::vector<std::vector<int>>& parts) {
    std::set<int> s;
    for (auto& p : parts) s.insert(p.begin(), p.end());
    return {s.begin(), s.end()};
}

} // namespace

std::vector<Contraction> contractions(const Context& ctx, const Program& d, size_t split_line,
                                      const std::vector<std::string>& labels,
                                      const std::optional<std::optional<Statement>>& target) {
    const Theory& th = ctx.theory();
    if (split_line >= d.size() || !th.disjunction(d[split_line].name)) return {};
    FreshNames fresh(d, th.constants());
    auto ops = splice_operands(th, d, split_line, fresh);
    if (labels.size() != ops.size()) return {};
    std::vector<BranchOptions> br;
    for (size_t i = 0; i < ops.size(); ++i) {
        std::vector<Option> o;
        if (is_automated_label(labels[i]) && labels[i] != "disj") o = one_step(ctx, ops[i].d, labels[i]);
        else if (auto* r = ctx.find(labels[i])) o = rule_options(ctx, ops[i].d, *r);
        else return {};
        br.push_back(collect(o, d, th.constants()));
    }
    std::vector<Contraction> out;
    auto mapped = [&](size_t i, const Option& o) {
        std::vector<int> v;
        for (int l : o.cl) v.push_back(ops[i].back(l));
        return v;
    };
    bool all_false = std::all_of(br.begin(), br.end(), [](auto& b) { return !b.falses.empty(); });
    if (all_false && (!target || !*target)) {
        Contraction c;
        std::vector<std::vector<int>> parts;
        for (size_t i = 0; i < br.size(); ++i) {
            c.branch.push_back({true, br[i].falses.front()});
            parts.push_back(mapped(i, br[i].falses.front()));
        }
        c.cl = merge_support(parts);
        out.push_back(std::move(c));
    }
    std::set<std::string> shapes;
    for (auto& b : br)
        for (auto& [k, v] : b.by_shape) shapes.insert(k);
    for (auto& sh : shapes) {
        if (target && shape_of(*target) != sh) continue;
        Contraction c;
        std::vector<std::vector<int>> parts;
        bool ok = true;
        for (size_t i = 0; i < br.size() && ok; ++i) {
            auto it = br[i].by_shape.find(sh);
            if (it != br[i].by_shape.end()) {
                c.branch.push_back({false, it->second.front()});
                parts.push_back(mapped(i, it->second.front()));
                if (!c.conclusion) c.conclusion = it->second.front().conclusion;
            } else if (!br[i].falses.empty()) {
                c.branch.push_back({true, br[i].falses.front()});
                parts.push_back(mapped(i, br[i].falses.front()));
            } else {
                ok = false;
            }
        }
        if (!ok || !c.conclusion) continue;
        FreshNames f(d, th.constants());
        for (auto& sp : ops) for (auto& n : io_names(sp.d)) f.reserve(n);
        c.conclusion = with_fresh_outputs(*c.conclusion, f);
        c.cl = merge_support(parts);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Option> disj_options(const Context& ctx, const Program& d, const std::vector<size_t>& split_lines,
                                 const std::set<std::string>* skip_shapes) {
    const Theory& th = ctx.theory();
    std::vector<Option> out;
    for (size_t s : split_lines) {
        if (s >= d.size() || !th.disjunction(d[s].name)) continue;
        FreshNames fresh(d, th.constants());
        auto ops = splice_operands(th, d, s, fresh);
        std::vector<BranchOptions> br;
        for (auto& sp : ops) br.push_back(collect(one_step(ctx, sp.d), d, th.constants()));
        auto labels_of = [](const std::vector<Option>& v) {
            std::vector<std::string> out;
            for (auto& o : v)
                if (std::find(out.begin(), out.end(), o.label) == out.end()) out.push_back(o.label);
            return out;
        };
        auto support = [&](const std::vector<std::vector<Option>>& per_branch) {
            std::vector<std::vector<int>> parts;
            for (size_t i = 0; i < per_branch.size(); ++i) {
                std::vector<int> v;
                for (int l : per_branch[i].front().cl) v.push_back(ops[i].back(l));
                parts.push_back(v);
            }
            return merge_support(parts);
        };
        // emit one option per combination of branch labels
        auto emit = [&](const std::optional<Statement>& c, const std::vector<std::vector<Option>>& per_branch) {
            std::vector<std::vector<std::string>> lab;
            for (auto& v : per_branch) lab.push_back(labels_of(v));
            std::vector<size_t> idx(lab.size(), 0);
            size_t produced = 0;
            while (produced < 64) {
                Option o;
                o.conclusion = c;
                o.label = "disj";
                o.prov = Provenance::Disj;
                for (size_t i = 0; i < lab.size(); ++i) o.branches.push_back(lab[i][idx[i]]);
                o.cl = support(per_branch);
                out.push_back(std::move(o));
                ++produced;
                size_t i = 0;
                while (i < idx.size() && ++idx[i] == lab[i].size()) idx[i++] = 0;
                if (i == idx.size()) break;
            }
        };
        bool all_false = std::all_of(br.begin(), br.end(), [](auto& b) { return !b.falses.empty(); });
        if (all_false) {
            std::vector<std::vector<Option>> per;
            for (auto& b : br) per.push_back(b.falses);
            emit(std::nullopt, per);
        }
        std::set<std::string> shapes;
        for (auto& b : br)
            for (auto& [k, v] : b.by_shape) shapes.insert(k);
        FreshNames f(d, th.constants());
        for (auto& sp : ops) for (auto& n : io_names(sp.d)) f.reserve(n);
        for (auto& sh : shapes) {
            if (skip_shapes && skip_shapes->count(sh)) continue;
            std::vector<std::vector<Option>> per;
            std::optional<Statement> c;
            bool ok = true;
            for (auto& b : br) {
                auto it = b.by_shape.find(sh);
                if (it != b.by_shape.end()) {
                    per.push_back(it->second);
                    if (!c) c = it->second.front().conclusion;
                } else if (!b.falses.empty()) {
                    per.push_back(b.falses);
                } else {
                    ok = false;
                    break;
                }
            }
            if (!ok || !c) continue;
            FreshNames g = f;
            emit(with_fresh_outputs(*c, g), per);
        }
    }
    dedupe(out);
    return out;
}

LineVerdict verify_line(const Context& ctx, const std::vector<ProofLine>& lines, size_t k) {
    const Theory& th = ctx.theory();
    const ProofLine& line = lines[k];
    LineVerdict v;
    auto fail = [&](std::string kind, std::string msg) {
        v.ok = false;
        v.kind = std::move(kind);
        v.message = std::move(msg);
        return v;
    };
    for (size_t i = 0; i < k; ++i)
        if (!lines[i].stmt) return fail("NotAProof", "line after :false");
    Program d = statements_of(std::vector<ProofLine>(lines.begin(), lines.begin() + k));
    if (line.is_premise()) return fail("NoMatch", "premise line after derived lines");
    for (int c : line.cl)
        if (c < 1 || c > (int)k) return fail("BadConnectionList", "entry " + std::to_string(c) + " out of range");

    if (line.stmt) {
        auto* sig = th.atom(line.stmt->name);
        if (!sig) return fail("UnknownAtom", line.stmt->name);
        if (sig->in_types.size() != line.stmt->ins.size() || sig->out_types.size() != line.stmt->outs.size())
            return fail("NoMatch", "arity of " + to_string(*line.stmt));
        TokenList names = io_names(d);
        std::set<std::string> seen;
        for (auto& y : line.stmt->outs) {
            if (th.constants().contains(y) || std::find(names.begin(), names.end(), y) != names.end() ||
                !seen.insert(y).second)
                return fail("NotFresh", "output " + y + " is not a new name");
        }
        for (auto& x : line.stmt->ins)
            if (!th.constants().contains(x) && std::find(names.begin(), names.end(), x) == names.end())
                return fail("NoMatch", "input " + x + " is not bound by earlier lines");
    }
    std::string want = shape_of(line.stmt);
    auto hit = [&](const std::vector<Option>& opts) {
        for (auto& o : opts)
            if (o.shape() == want) {
                v.support = o.cl;
                return true;
            }
        return false;
    };
    FreshNames base(d, th.constants());
    const std::string& lab = line.label;
    if (lab == "aio") {
        if (line.cl.size() != 1) return fail("BadConnectionList", "aio cites one line");
        std::vector<size_t> only{(size_t)line.cl[0] - 1};
        if (hit(aio_options(th, d, &only))) return v;
        return fail("NoMatch", "no I/O type statement of line " + std::to_string(line.cl[0]) + " gives this line");
    }
    if (lab == "sr1" || lab == "sr2") {
        size_t n = lab == "sr1" ? 2 : 3;
        if (line.cl.size() != n) return fail("BadConnectionList", lab + " cites " + std::to_string(n) + " lines");
        std::vector<size_t> idx;
        for (int c : line.cl) idx.push_back((size_t)c - 1);
        std::vector<size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<Option> o;
            if (n == 2) sr1_pair(th, d, idx[perm[0]], idx[perm[1]], base, o);
            else sr2_triple(th, d, idx[perm[0]], idx[perm[1]], idx[perm[2]], base, o);
            if (hit(o)) {
                v.support = line.cl;
                return v;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return fail("NoMatch", "cited lines do not give this line by " + lab);
    }
    if (lab == "disj") {
        if (line.branches.size() < 2) return fail("BadConnectionList", "disj cites the operand rules");
        for (auto& b : line.branches)
            if (!is_automated_label(b) && !ctx.find(b)) return fail("UnknownLabel", b);
        std::vector<size_t> cands;
        for (size_t i = 0; i < k; ++i)
            if (lines[i].star && th.disjunction(d[i].name)) cands.push_back(i);
        if (cands.empty())
            for (size_t i = 0; i < k; ++i)
                if (th.disjunction(d[i].name)) cands.push_back(i);
        for (size_t s : cands) {
            auto cs = contractions(ctx, d, s, line.branches, std::optional<std::optional<Statement>>(line.stmt));
            if (!cs.empty()) {
                v.support = cs.front().cl;
                return v;
            }
        }
        return fail("ConclusionMismatch", "operand branches do not conclude this line");
    }
    auto* r = ctx.find(lab);
    if (!r) return fail("UnknownLabel", lab);
    if (line.cl.size() != r->premise.size())
        return fail("BadConnectionList", lab + " has " + std::to_string(r->premise.size()) + " premise statements");
    if (r->is_falsity() != !line.stmt) return fail("NoMatch", "falsity rules conclude :false");
    std::vector<size_t> cited;
    for (int c : line.cl) cited.push_back((size_t)c - 1);
    std::vector<size_t> sorted_cited = cited;
    std::sort(sorted_cited.begin(), sorted_cited.end());
    std::vector<size_t> uniq = sorted_cited;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::vector<size_t>> allowed(r->premise.size(), uniq);
    bool found = false;
    std::string detail;
    match_premise(r->premise, d, th.constants(), [&](const Binding& b, const std::vector<size_t>& chosen) {
        std::vector<size_t> c = chosen;
        std::sort(c.begin(), c.end());
        if (c != sorted_cited) return true;
        if (r->is_falsity()) {
            found = true;
            return false;
        }
        Statement inst = apply_binding(*r->conclusion, b);
        if (inst.name == line.stmt->name && inst.ins == line.stmt->ins && inst.outs.size() == line.stmt->outs.size()) {
            found = true;
            return false;
        }
        detail = "rule gives " + shape_of(inst);
        return true;
    }, &allowed);
    if (!found)
        return fail("NoMatch", "cited lines do not match the premise of " + lab + (detail.empty() ? "" : " (" + detail + ")"));
    v.support = line.cl;
    return v;
}

const char* status_name(SessionStatus s) {
    switch (s) {
    case SessionStatus::Open: return "open";
    case SessionStatus::Concluded: return "concluded";
    default: return "false";
    }
}

Session::Session(std::shared_ptr<const Theory> th, const Program& premises, const std::vector<bool>& stars)
    : theory(std::move(th)) {
    auto v = validate_program(premises, theory->constants(), nullptr);
    if (!v.ok()) throw Error("InvalidPremise", v.errors.front().str());
    for (auto& s : premises) {
        auto* a = theory->atom(s.name);
        if (!a) throw Error("InvalidPremise", "unknown atom " + s.name);
        if (a->in_types.size() != s.ins.size() || a->out_types.size() != s.outs.size())
            throw Error("InvalidPremise", "arity of " + to_string(s));
    }
    for (size_t i = 0; i < premises.size(); ++i) {
        ProofLine l;
        l.number = (int)i + 1;
        l.stmt = premises[i];
        l.star = i < stars.size() && stars[i];
        lines.push_back(l);
    }
    premise_count = premises.size();
}

std::vector<Option> Session::enumerate_options() const {
    if (status == SessionStatus::False) return {};
    Context ctx = context();
    Program d = program();
    std::vector<Option> opts = one_step(ctx, d);
    std::set<std::string> shapes;
    for (auto& o : opts) shapes.insert(o.shape());
    std::vector<size_t> splits;
    for (size_t i = 0; i < lines.size(); ++i)
        if (lines[i].star && lines[i].stmt && theory->disjunction(lines[i].stmt->name)) splits.push_back(i);
    auto dj = disj_options(ctx, d, splits, &shapes);
    opts.insert(opts.end(), dj.begin(), dj.end());
    return opts;
}

std::vector<Option> auto_sr(const Session& s) {
    Program d = s.program();
    auto a = sr1_options(*s.theory, d);
    auto b = sr2_options(*s.theory, d);
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<Option> Session::detect_falsity() const {
    std::vector<Option> out;
    Context ctx = context();
    Program d = program();
    for (auto* r : ctx.rules())
        if (r->is_falsity())
            for (auto& o : rule_options(ctx, d, *r)) out.push_back(o);
    return out;
}

const ProofLine& Session::apply_option(const Option& opt) {
    if (status == SessionStatus::False) throw Error("StaleOption", "session is false");
    ProofLine l;
    l.number = (int)lines.size() + 1;
    l.stmt = opt.conclusion;
    l.label = opt.label;
    l.branches = opt.branches;
    if (opt.prov != Provenance::Disj) l.cl = opt.cl;
    if (l.stmt) {
        Program d = program();
        FreshNames f(d, theory->constants());
        TokenList names = io_names(d);
        for (auto& y : l.stmt->outs)
            if (std::find(names.begin(), names.end(), y) != names.end() || theory->constants().contains(y)) y = f.next();
    }
    lines.push_back(l);
    auto v = verify_line(context(), lines, lines.size() - 1);
    if (!v.ok) {
        lines.pop_back();
        throw Error("StaleOption", v.kind + ": " + v.message);
    }
    if (!l.stmt) status = SessionStatus::False;
    return lines.back();
}

const ProofLine& Session::apply_literal(const std::string& text) {
    ProofLine l = parse_proof_line("1 " + text, theory->mach.nstr);
    if (!l.label.empty()) {
        Option o;
        o.conclusion = l.stmt;
        o.label = l.label;
        o.cl = l.cl;
        o.branches = l.branches;
        o.prov = l.label == "disj" ? Provenance::Disj : Provenance::Rule;
        l.number = (int)lines.size() + 1;
        lines.push_back(l);
        auto v = verify_line(context(), lines, lines.size() - 1);
        lines.pop_back();
        if (!v.ok) throw Error("NotAnOption", v.kind + ": " + v.message);
        return apply_option(o);
    }
    std::string want = shape_of(l.stmt);
    for (auto& o : enumerate_options()) {
        if (o.shape() != want) continue;
        Option chosen = o;
        if (l.stmt) chosen.conclusion->outs = l.stmt->outs;  // keep the user's names; renamed if they clash
        return apply_option(chosen);
    }
    throw Error("NotAnOption", render_statement_or_false(l.stmt));
}

std::vector<std::shared_ptr<Session>> Session::split(int line) {
    if (line < 1 || line > (int)lines.size() || !lines[line - 1].stmt) throw Error("NotADisjunction", "no such line");
    const Statement& s = *lines[line - 1].stmt;
    if (!theory->disjunction(s.name)) throw Error("NotADisjunction", to_string(s));
    Program d = program();
    FreshNames fresh(d, theory->constants());
    std::vector<std::shared_ptr<Session>> kids;
    for (auto& op : theory->operands_of(s, [&] { return fresh.next(); })) {
        Program p(d.begin(), d.begin() + (line - 1));
        p.insert(p.end(), op.begin(), op.end());
        p.insert(p.end(), d.begin() + line, d.end());
        auto child = std::make_shared<Session>(theory, p);
        child->extra = extra;
        child->hidden = hidden;
        kids.push_back(child);
    }
    lines[line - 1].star = true;
    children[line] = kids;
    return kids;
}

const ProofLine& Session::contract(int line, const std::string& a, const std::string& b,
                                   const std::optional<std::string>& statement) {
    if (status == SessionStatus::False) throw Error("ConclusionMismatch", "session is false");
    if (line < 1 || line > (int)lines.size() || !lines[line - 1].stmt) throw Error("NotADisjunction", "no such line");
    if (auto it = children.find(line); it != children.end())
        for (auto& c : it->second)
            if (c->status == SessionStatus::Open) throw Error("BranchOpen", "operand branch still open");
    Context ctx = context();
    for (auto& l : {a, b})
        if (!is_automated_label(l) && !ctx.find(l)) throw Error("UnknownLabel", l);
    std::optional<std::optional<Statement>> target;
    if (statement) {
        if (*statement == ":false") target = std::optional<Statement>();
        else target = std::optional<Statement>(parse_statement(*statement));
    }
    auto cs = contractions(ctx, program(), (size_t)line - 1, {a, b}, target);
    if (cs.empty()) throw Error("ConclusionMismatch", "operand branches share no conclusion under " + a + " and " + b);
    Option o;
    o.conclusion = cs.front().conclusion;
    o.label = "disj";
    o.branches = {a, b};
    o.prov = Provenance::Disj;
    lines[line - 1].star = true;
    return apply_option(o);
}

ProofScript Session::to_script(RuleKind kind, const std::string& label) const {
    ProofScript s;
    s.kind = kind;
    s.label = label;
    for (size_t i = 0; i < premise_count; ++i) s.premise.push_back(*lines[i].stmt);
    if (!lines.empty()) s.conclusion = lines.back().stmt;
    s.has_proof = true;
    s.lines = lines;
    return s;
}

} // namespace pecr
