#include "pecr/foundry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pecr {

std::string SoundnessVerdict::str() const {
    std::string out = label + ": " + std::to_string(samples) + " samples, " + std::to_string(computed) + " computed, ";
    if (!violation()) return out + "no violation";
    out += "violation";
    if (error) out += " (" + error->str() + ")";
    std::string env;
    for (auto& [k, v] : *counterexample) env += (env.empty() ? "" : ", ") + k + "=" + render_value(v);
    return out + " at {" + env + "}";
}

Sampler::Sampler(const Theory& th, const MachParams& mach, uint64_t seed) : th_(th), mach_(mach), rng_(seed) {}

int64_t Sampler::scalar() {
    int64_t nint = mach_.nint;
    int64_t root = std::max<int64_t>(1, (int64_t)std::sqrt((double)nint));
    int64_t lim;
    switch (std::uniform_int_distribution<int>(0, 19)(rng_)) {
    case 0: case 1: case 2: case 3: case 4: case 5: case 6: case 7: case 8: lim = 3; break;
    case 9: case 10: case 11: case 12: lim = 10; break;
    case 13: case 14: case 15: lim = root; break;
    case 16: case 17: lim = nint; break;
    default: {
        // machine boundary
        int64_t off = std::uniform_int_distribution<int64_t>(0, 2)(rng_);
        return (rng_() & 1 ? 1 : -1) * std::max<int64_t>(0, nint - off);
    }
    }
    lim = std::min(lim, nint);
    return std::uniform_int_distribution<int64_t>(-lim, lim)(rng_);
}

std::vector<int64_t> Sampler::vec(size_t dim) {
    std::vector<int64_t> v(dim);
    for (auto& x : v) x = std::uniform_int_distribution<int>(0, 9)(rng_) < 7 ? std::uniform_int_distribution<int64_t>(-3, 3)(rng_) : scalar();
    return v;
}

Env Sampler::draw(const Program& p) {
    Env env;
    size_t dim = std::uniform_int_distribution<size_t>(1, 4)(rng_);
    std::map<std::string, std::vector<std::string>> by_type;
    for (auto& tok : free_vars(p, th_.constants())) {
        std::string ty = th_.token_type(p, tok);
        auto& same = by_type[ty];
        // equal values make equality premises computable at a usable rate
        if (!same.empty() && std::uniform_int_distribution<int>(0, 3)(rng_) == 0) {
            env[tok] = env.at(same[std::uniform_int_distribution<size_t>(0, same.size() - 1)(rng_)]);
            same.push_back(tok);
            continue;
        }
        same.push_back(tok);
        if (ty == "int") {
            env[tok] = Int{scalar()};
        } else if (ty == "rat") {
            int64_t j = std::uniform_int_distribution<int64_t>(0, mach_.eps_digits)(rng_);
            int64_t m = std::uniform_int_distribution<int64_t>(-9, 9)(rng_);
            int64_t unit = 1;
            for (int64_t k = 0; k < j; ++k) unit *= 10;
            int64_t k = std::uniform_int_distribution<int>(0, 3)(rng_) == 0 ? scalar() : m * unit;
            env[tok] = Rat{std::clamp(k, -mach_.nint, mach_.nint)};
        } else if (ty == "vec") {
            env[tok] = Vec{vec(dim)};
        } else if (ty == "box") {
            Box b{Vec{vec(dim)}, Vec{}};
            for (auto x : b.lo.v) b.hi.v.push_back(std::min(mach_.nint, x + std::uniform_int_distribution<int64_t>(0, 5)(rng_)));
            env[tok] = b;
        } else {
            env[tok] = Term{tok};
        }
    }
    return env;
}

namespace {

Program full_program(const RuleRecord& r) {
    Program p = r.premise;
    if (r.conclusion) p.push_back(*r.conclusion);
    return p;
}

void require_hooks(const RuleRecord& r, const Evaluator& ev) {
    for (auto& s : full_program(r))
        if (!ev.has_hook(s.name)) throw Error("NoEvaluatorHook", s.name + " in " + r.label);
}

constexpr int kAttempts = 64;

} // namespace

SoundnessVerdict soundness_sample(const RuleRecord& r, const Theory& th, int64_t samples, const MachParams& mach,
                                  uint64_t seed, const std::function<void(Evaluator&)>& setup) {
    Evaluator ev(th, mach);
    if (setup) setup(ev);
    require_hooks(r, ev);
    Sampler smp(th, mach, seed);
    SoundnessVerdict v;
    v.label = r.label;
    Program full = full_program(r);
    for (int64_t i = 0; i < samples; ++i) {
        ++v.samples;
        std::optional<Env> env;
        for (int a = 0; a < kAttempts && !env; ++a) {
            Env e = smp.draw(r.premise);
            if (ev.eval(r.premise, e).ok()) env = std::move(e);
        }
        if (!env) continue;
        ++v.computed;
        if (r.is_falsity()) {
            v.counterexample = env;
            v.error = ExecError{"FalsityComputable", r.premise.size(), "premise of a falsity rule computes"};
            return v;
        }
        auto res = ev.eval(full, *env);
        if (!res.ok()) {
            v.counterexample = env;
            v.error = res.error;
            return v;
        }
    }
    return v;
}

std::optional<ExecError> replay(const RuleRecord& r, const Theory& th, const Env& env, const MachParams& mach,
                                const std::function<void(Evaluator&)>& setup) {
    Evaluator ev(th, mach);
    if (setup) setup(ev);
    if (r.is_falsity()) {
        if (ev.eval(r.premise, env).ok()) return ExecError{"FalsityComputable", r.premise.size(), "premise of a falsity rule computes"};
        return std::nullopt;
    }
    return ev.eval(full_program(r), env).error;
}

std::vector<std::string> purge(const std::string& label, Theory& th) {
    if (!th.rule(label)) throw Error("UnknownLabel", label);
    auto deps = dependents_of(label, th);
    std::vector<std::string> out{label};
    out.insert(out.end(), deps.begin(), deps.end());
    for (auto& l : out) th.remove_rule(l);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

bool injective(const Binding& b, const ConstSet& cst) {
    std::set<std::string> seen;
    for (auto& [k, v] : b) {
        if (cst.contains(k)) continue;
        if (!seen.insert(v).second) return false;
    }
    return true;
}

bool embeds(const RuleRecord& a, const RuleRecord& b, const ConstSet& cst) {
    bool found = false;
    match_premise(b.premise, a.premise, cst, [&](const Binding& bind, const std::vector<size_t>& chosen) {
        std::set<size_t> distinct(chosen.begin(), chosen.end());
        if (distinct.size() != chosen.size()) return true;
        if (!b.conclusion) {
            found = injective(bind, cst);
            return !found;
        }
        Binding bb = bind;
        for (size_t k = 0; k < b.conclusion->outs.size(); ++k) bb[b.conclusion->outs[k]] = a.conclusion->outs[k];
        if (injective(bb, cst) && apply_binding(*b.conclusion, bb) == *a.conclusion) found = true;
        return !found;
    });
    return found;
}

} // namespace

bool rules_equivalent(const RuleRecord& a, const RuleRecord& b, const ConstSet& cst) {
    if (a.premise.size() != b.premise.size() || a.is_falsity() != b.is_falsity()) return false;
    if (a.conclusion && (a.conclusion->name != b.conclusion->name || a.conclusion->ins.size() != b.conclusion->ins.size() ||
                         a.conclusion->outs.size() != b.conclusion->outs.size()))
        return false;
    return embeds(a, b, cst) && embeds(b, a, cst);
}

SweepReport relabel_sweep(Theory& th) {
    SweepReport rep;
    std::vector<RuleRecord> axioms, theorems;
    for (auto& r : th.rules()) (r.is_axiom() ? axioms : theorems).push_back(r);
    for (size_t i = 0; i < axioms.size(); ++i)
        for (size_t j = i + 1; j < axioms.size(); ++j)
            if (rules_equivalent(axioms[i], axioms[j], th.constants())) rep.flagged.emplace_back(axioms[i].label, axioms[j].label);
    for (auto& a : axioms) {
        for (auto& t : theorems) {
            if (!rules_equivalent(a, t, th.constants())) continue;
            std::set<std::string> base;
            try {
                base = reduce_theorem_connections(t.label, th);
            } catch (const Error&) {
                continue;
            }
            if (base.count(a.label)) continue;  // the proof rests on the axiom itself
            th.relabel(a.label, RuleKind::Theorem, t.tcl.empty() ? TokenList{t.label} : t.tcl);
            rep.relabeled.emplace_back(a.label, t.label);
            break;
        }
    }
    return rep;
}

bool derivable_within(const Theory& store, const RuleRecord& r, int steps) {
    if (!r.conclusion) return false;
    Context ctx(store);
    std::string want = shape_of(r.conclusion);
    std::function<bool(const Program&, int)> rec = [&](const Program& d, int left) {
        auto opts = one_step(ctx, d);
        for (auto& o : opts)
            if (o.conclusion && o.shape() == want) return true;
        if (left <= 1) return false;
        std::set<std::string> tried;
        for (auto& o : opts) {
            if (!o.conclusion || !tried.insert(o.shape()).second) continue;
            Program d2 = d;
            d2.push_back(*o.conclusion);
            if (rec(d2, left - 1)) return true;
        }
        return false;
    };
    return rec(r.premise, steps);
}

namespace {

struct Enumerator {
    const Theory& th;
    const std::vector<std::string>& atoms;
    size_t max_premise;
    size_t cap;
    std::function<void(const RuleRecord&)> emit;
    std::function<bool(const Program&)> on_premise;  // false: skip its conclusions
    size_t max_consts = 1;
    size_t count = 0;

    size_t consts_in(const Program& p) const {
        size_t n = 0;
        for (auto& s : p)
            for (auto& t : s.ins) n += th.constants().contains(t);
        return n;
    }

    std::vector<std::string> consts_of(const std::string& type) const {
        std::vector<std::string> out;
        for (auto& [n, c] : th.const_info())
            if (c.type == type && !c.program) out.push_back(n);
        return out;
    }

    static std::string nth_name(size_t k) {
        std::string n(1, char('a' + k % 26));
        if (k >= 26) n += std::to_string(k / 26);
        return n;
    }

    // fills the input positions of statement s from k onward
    void inputs(Statement s, size_t k, const Program& p, TokenList names, std::map<std::string, std::string> types,
                const std::function<void(const Statement&, const TokenList&, std::map<std::string, std::string>)>& done,
                bool allow_new) {
        if (k == s.ins.size()) {
            done(s, names, types);
            return;
        }
        std::string ty = th.position_type(s.name, k, false);
        for (auto& n : names) {
            if (types[n] != ty) continue;
            s.ins[k] = n;
            inputs(s, k + 1, p, names, types, done, allow_new);
        }
        for (auto& c : consts_of(ty)) {
            s.ins[k] = c;
            inputs(s, k + 1, p, names, types, done, allow_new);
        }
        if (allow_new) {
            std::string n = nth_name(names.size());
            s.ins[k] = n;
            TokenList names2 = names;
            names2.push_back(n);
            auto types2 = types;
            types2[n] = ty;
            inputs(s, k + 1, p, names2, types2, done, allow_new);
        }
    }

    void premise(const Program& p, const TokenList& names, const std::map<std::string, std::string>& types) {
        if (!p.empty() && (!on_premise || on_premise(p))) conclusions(p, names, types);
        if (p.size() == max_premise) return;
        for (auto& a : atoms) {
            auto* sig = th.atom(a);
            if (!sig) throw Error("UnknownAtom", a);
            Statement s{a, TokenList(sig->in_types.size()), TokenList(sig->out_types.size())};
            inputs(s, 0, p, names, types, [&](const Statement& st, const TokenList& nm, std::map<std::string, std::string> ty) {
                Statement full = st;
                TokenList nm2 = nm;
                for (size_t k = 0; k < full.outs.size(); ++k) {
                    full.outs[k] = nth_name(nm2.size());
                    ty[full.outs[k]] = th.position_type(a, k, true);
                    nm2.push_back(full.outs[k]);
                }
                if (std::find(p.begin(), p.end(), full) != p.end()) return;
                Program p2 = p;
                p2.push_back(full);
                if (consts_in(p2) > max_consts) return;
                premise(p2, nm2, ty);
            }, true);
        }
    }

    void conclusions(const Program& p, const TokenList& names, const std::map<std::string, std::string>& types) {
        for (auto& a : atoms) {
            auto* sig = th.atom(a);
            Statement s{a, TokenList(sig->in_types.size()), TokenList(sig->out_types.size())};
            inputs(s, 0, p, names, types, [&](const Statement& st, const TokenList& nm, std::map<std::string, std::string>) {
                Statement c = st;
                for (size_t k = 0; k < c.outs.size(); ++k) c.outs[k] = nth_name(nm.size() + k);
                if (consts_in(p) + consts_in({c}) > max_consts) return;
                if (++count > cap) throw Error("CapExceeded", "more than " + std::to_string(cap) + " candidates");
                RuleRecord r;
                r.label = "cand" + std::to_string(count);
                r.kind = RuleKind::Axiom;
                r.premise = p;
                r.conclusion = c;
                emit(r);
            }, false);
        }
    }
};

// every premise statement must be linked to the conclusion through shared names
bool connected(const RuleRecord& r, const ConstSet& cst) {
    Program all = r.premise;
    all.push_back(*r.conclusion);
    auto names = [&](const Statement& s) {
        std::set<std::string> out;
        for (auto& t : s.ins)
            if (!cst.contains(t)) out.insert(t);
        for (auto& t : s.outs) out.insert(t);
        return out;
    };
    std::vector<bool> seen(all.size(), false);
    seen.back() = true;
    std::set<std::string> reach = names(all.back());
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t i = 0; i + 1 < all.size(); ++i) {
            if (seen[i]) continue;
            auto n = names(all[i]);
            if (std::any_of(n.begin(), n.end(), [&](auto& x) { return reach.count(x); })) {
                seen[i] = true;
                reach.insert(n.begin(), n.end());
                grew = true;
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

bool structural(const RuleRecord& r, const Theory& th) {
    const Statement& c = *r.conclusion;
    for (auto& s : r.premise) {
        if (s.name == c.name && s.ins == c.ins) return false;  // conclusion already present
        if (std::all_of(s.ins.begin(), s.ins.end(), [&](auto& t) { return th.constants().contains(t); })) return false;
    }
    if (!connected(r, th.constants())) return false;
    Program full = r.premise;
    full.push_back(c);
    return validate_program(full, th.constants()).ok();
}

// some strict sub-premise already yields the same conclusion soundly
bool reducible(const RuleRecord& r, const std::vector<RuleRecord>& sound, const ConstSet& cst) {
    if (r.premise.size() < 2) return false;
    for (size_t i = 0; i < r.premise.size(); ++i) {
        RuleRecord sub = r;
        sub.premise.erase(sub.premise.begin() + (long)i);
        Program full = sub.premise;
        full.push_back(*sub.conclusion);
        TokenList names = io_names(sub.premise);
        bool inputs_ok = std::all_of(full.back().ins.begin(), full.back().ins.end(), [&](auto& t) {
            return cst.contains(t) || std::find(names.begin(), names.end(), t) != names.end();
        });
        if (!inputs_ok || !validate_program(full, cst).ok()) continue;
        for (auto& s : sound)
            if (s.premise.size() == sub.premise.size() && rules_equivalent(s, sub, cst)) return true;
    }
    return false;
}

} // namespace

SearchResult search_axioms(const Theory& store, const std::vector<std::string>& atoms, size_t max_premise,
                           const MachParams& mach, uint64_t seed, const SearchCaps& caps) {
    if (atoms.size() > caps.max_atoms) throw Error("CapExceeded", "at most " + std::to_string(caps.max_atoms) + " atoms");
    if (max_premise > caps.max_premise) throw Error("CapExceeded", "premise length at most " + std::to_string(caps.max_premise));
    if (max_premise > (size_t)mach.nprem) throw Error("CapExceeded", "premise length exceeds nprem");
    SearchResult res;
    Evaluator probe(store, mach);
    for (auto& a : atoms)
        if (!probe.has_hook(a)) throw Error("NoEvaluatorHook", a);
    std::vector<RuleRecord> sound;
    Enumerator en{store, atoms, max_premise, caps.max_candidates, {}, {}, caps.max_constants};
    Evaluator ev(store, mach);
    std::vector<Env> computed;  // post-premise environments of the current premise
    uint64_t k = 0;
    en.on_premise = [&](const Program& p) {
        computed.clear();
        Sampler smp(store, mach, seed + 104729 * ++k);
        for (int64_t a = 0; a < 8 * caps.samples && (int64_t)computed.size() < caps.samples; ++a) {
            auto r = ev.eval(p, smp.draw(p));
            if (r.ok()) computed.push_back(std::move(r.env));
        }
        return !computed.empty();
    };
    en.emit = [&](const RuleRecord& r) {
        ++res.enumerated;
        if (!structural(r, store)) return;
        ++res.structural;
        for (auto& env : computed)
            if (!ev.eval({*r.conclusion}, env).ok()) return;
        for (auto& s : sound)
            if (rules_equivalent(s, r, store.constants())) return;
        sound.push_back(r);
    };
    en.premise({}, {}, {});
    res.sound = sound.size();
    for (auto& r : sound)
        if (!reducible(r, sound, store.constants()) && !derivable_within(store, r, 2)) res.survivors.push_back(r);
    for (size_t i = 0; i < res.survivors.size(); ++i) res.survivors[i].label = "axs" + std::to_string(i + 1);
    return res;
}

std::vector<IterationReport> iterate(Theory& th, int rounds, int64_t samples, const MachParams& mach, uint64_t seed,
                                     const std::vector<std::string>& search_atoms) {
    std::vector<IterationReport> out;
    for (int round = 0; round < rounds; ++round) {
        IterationReport rep;
        Evaluator probe(th, mach);
        std::vector<std::string> labels;
        for (auto& r : th.rules())
            if (r.is_axiom()) labels.push_back(r.label);
        uint64_t k = 0;
        for (auto& l : labels) {
            const RuleRecord* r = th.rule(l);
            if (!r) continue;  // purged earlier in this round
            bool hooks = true;
            for (auto& s : r->premise) hooks = hooks && probe.has_hook(s.name);
            if (r->conclusion) hooks = hooks && probe.has_hook(r->conclusion->name);
            if (!hooks) continue;
            auto v = soundness_sample(*r, th, samples, mach, seed + 7919 * (uint64_t)round + k++);
            if (!v.violation()) continue;
            rep.violated.push_back(l);
            for (auto& p : purge(l, th)) rep.purged.push_back(p);
        }
        rep.sweep = relabel_sweep(th);
        if (!search_atoms.empty()) rep.proposals = search_axioms(th, search_atoms, 2, mach, seed + round).survivors;
        out.push_back(std::move(rep));
    }
    return out;
}

} // namespace pecr
