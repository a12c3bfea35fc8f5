#include "pecr/theory.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace pecr {

namespace fs = std::filesystem;

bool is_automated_label(const std::string& l) { return l == "aio" || l == "sr1" || l == "sr2" || l == "disj"; }

const AtomSig* Theory::atom(const std::string& n) const {
    auto it = atoms_.find(n);
    return it == atoms_.end() ? nullptr : &it->second;
}
const TypeInfo* Theory::type(const std::string& n) const {
    auto it = types_.find(n);
    return it == types_.end() ? nullptr : &it->second;
}
const DisjunctionDef* Theory::disjunction(const std::string& n) const {
    auto it = disj_.find(n);
    return it == disj_.end() ? nullptr : &it->second;
}
const RuleRecord* Theory::rule(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? nullptr : &rules_[it->second];
}

std::set<std::string> Theory::atom_names() const {
    std::set<std::string> out;
    for (auto& [k, v] : atoms_) out.insert(k);
    return out;
}

std::string Theory::position_type(const std::string& a, size_t pos, bool output) const {
    auto* sig = atom(a);
    if (!sig) return "";
    auto& v = output ? sig->out_types : sig->in_types;
    return pos < v.size() ? v[pos] : "";
}

std::string Theory::token_type(const Program& p, const std::string& tok) const {
    if (auto it = const_info_.find(tok); it != const_info_.end()) return it->second.type;
    for (auto& s : p) {
        for (size_t k = 0; k < s.ins.size(); ++k)
            if (s.ins[k] == tok) return position_type(s.name, k, false);
        for (size_t k = 0; k < s.outs.size(); ++k)
            if (s.outs[k] == tok) return position_type(s.name, k, true);
    }
    return "";
}

std::string Theory::eq_atom_for(const std::string& t) const {
    auto* ti = type(t);
    return ti ? ti->eq_atom : "";
}
std::string Theory::check_atom_for(const std::string& t) const {
    auto* ti = type(t);
    return ti ? ti->check_atom : "";
}
bool Theory::is_eq_atom(const std::string& a) const {
    for (auto& [k, t] : types_)
        if (!t.eq_atom.empty() && t.eq_atom == a) return true;
    return false;
}

void Theory::add_atom(AtomSig a) {
    if (a.kind != AtomKind::Asgn && !a.out_types.empty()) throw Error("InvalidTheory", a.name + ": only asgn atoms have outputs");
    if (a.kind == AtomKind::Asgn && a.out_types.empty()) throw Error("InvalidTheory", a.name + ": asgn atom without outputs");
    atoms_[a.name] = std::move(a);
}
void Theory::add_type(TypeInfo t) { types_[t.name] = std::move(t); }
void Theory::add_const(ConstInfo c) {
    cst_.add(c.name);
    const_info_[c.name] = std::move(c);
}

void Theory::add_disjunction(DisjunctionDef d) {
    // free inputs of each operand are the formal inputs; each operand binds the formal outputs
    TokenList formal = unique(setminus(d.ins, TokenList{}));
    TokenList formal_vars;
    for (auto& t : formal)
        if (!cst_.contains(t)) formal_vars.push_back(t);
    std::sort(formal_vars.begin(), formal_vars.end());
    if (d.operands.size() < 2) throw Error("InvalidTheory", d.name + ": a disjunction needs two operands");
    for (auto& op : d.operands) {
        TokenList fv = free_vars(op, cst_);
        std::sort(fv.begin(), fv.end());
        if (fv != formal_vars) throw Error("InvalidTheory", d.name + ": operand free inputs differ from the formal inputs");
        TokenList outs;
        for (auto& s : op) outs.insert(outs.end(), s.outs.begin(), s.outs.end());
        for (auto& o : d.outs)
            if (std::find(outs.begin(), outs.end(), o) == outs.end())
                throw Error("InvalidTheory", d.name + ": operand does not bind output " + o);
        if (!validate_program(op, cst_).ok()) throw Error("InvalidTheory", d.name + ": operand is not a program");
    }
    disj_[d.name] = std::move(d);
}

void Theory::validate_rule(const RuleRecord& r) const {
    if ((int64_t)r.premise.size() > mach.nprem)
        throw Error("InvalidRule", r.label + ": premise longer than nprem");
    Program all = r.premise;
    if (r.conclusion) all.push_back(*r.conclusion);
    for (auto& s : all) {
        auto* a = atom(s.name);
        if (!a) throw Error("UnknownAtom", r.label + ": " + s.name);
        if (a->in_types.size() != s.ins.size() || a->out_types.size() != s.outs.size())
            throw Error("InvalidRule", r.label + ": arity of " + to_string(s));
    }
    auto v = validate_program(all, cst_);
    if (!v.ok()) throw Error("InvalidRule", r.label + ": " + v.errors.front().str());
    if (r.conclusion) {
        TokenList names = io_names(r.premise);
        for (auto& x : r.conclusion->ins)
            if (!cst_.contains(x) && std::find(names.begin(), names.end(), x) == names.end())
                throw Error("InvalidRule", r.label + ": conclusion input " + x + " is not a premise name");
        for (auto& y : r.conclusion->outs)
            if (std::find(names.begin(), names.end(), y) != names.end())
                throw Error("InvalidRule", r.label + ": conclusion output " + y + " is not new");
    }
}

void Theory::store_rule(RuleRecord r) {
    if (index_.count(r.label)) throw Error("DuplicateLabel", r.label);
    validate_rule(r);
    index_[r.label] = rules_.size();
    rules_.push_back(std::move(r));
}

void Theory::relabel(const std::string& label, RuleKind kind, const TokenList& tcl) {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("UnknownLabel", label);
    rules_[it->second].kind = kind;
    if (!tcl.empty()) rules_[it->second].tcl = tcl;
}

void Theory::remove_rule(const std::string& label) {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("UnknownLabel", label);
    rules_.erase(rules_.begin() + it->second);
    index_.clear();
    for (size_t k = 0; k < rules_.size(); ++k) index_[rules_[k].label] = k;
}

void Theory::merge(const Theory& o) {
    for (auto& [k, t] : o.types_) types_[k] = t;
    for (auto& [k, c] : o.const_info_) add_const(c);
    for (auto& [k, a] : o.atoms_) atoms_[k] = a;
    for (auto& [k, d] : o.disj_) disj_[k] = d;
    for (auto& r : o.rules_) {
        if (index_.count(r.label)) throw Error("DuplicateLabel", r.label + " (from " + o.name + ")");
        index_[r.label] = rules_.size();
        rules_.push_back(r);
    }
}

std::vector<Program> Theory::operands_of(const Statement& s, const std::function<std::string()>& fresh) const {
    auto* d = disjunction(s.name);
    if (!d) throw Error("NotADisjunction", to_string(s));
    if (d->ins.size() != s.ins.size() || d->outs.size() != s.outs.size())
        throw Error("NotADisjunction", "arity mismatch for " + to_string(s));
    Binding b;
    for (size_t k = 0; k < d->ins.size(); ++k) b[d->ins[k]] = s.ins[k];
    for (size_t k = 0; k < d->outs.size(); ++k) b[d->outs[k]] = s.outs[k];
    std::vector<Program> out;
    for (auto& op : d->operands) {
        Binding local = b;
        Program p;
        for (auto& st : op) {
            for (auto& y : st.outs)
                if (!local.count(y)) local[y] = fresh();
            p.push_back(apply_binding(st, local));
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

struct Matcher {
    const Program& tmpl;
    const Program& lines;
    const ConstSet& cst;
    const MatchVisitor& visit;
    std::vector<std::vector<size_t>> cand;
    Binding b;
    std::vector<size_t> chosen;
    std::vector<bool> done;
    bool stop = false;

    bool try_bind(const Statement& inst, const Statement& t, std::vector<std::string>& added) {
        auto one = [&](const std::string& tv, const std::string& x) {
            if (is_template_const(tv, cst)) return tv == x;
            auto it = b.find(tv);
            if (it != b.end()) return it->second == x;
            b.emplace(tv, x);
            added.push_back(tv);
            return true;
        };
        for (size_t k = 0; k < t.ins.size(); ++k)
            if (!one(t.ins[k], inst.ins[k])) return false;
        for (size_t k = 0; k < t.outs.size(); ++k)
            if (!one(t.outs[k], inst.outs[k])) return false;
        return true;
    }
    void undo(std::vector<std::string>& added) {
        for (auto& t : added) b.erase(t);
        added.clear();
    }
    bool compatible(size_t i, size_t line) {
        std::vector<std::string> added;
        bool ok = try_bind(lines[line], tmpl[i], added);
        undo(added);
        return ok;
    }

    void rec(size_t depth) {
        if (stop) return;
        if (depth == tmpl.size()) {
            if (!visit(b, chosen)) stop = true;
            return;
        }
        size_t best = SIZE_MAX, best_n = SIZE_MAX;
        std::vector<size_t> best_ok;
        for (size_t i = 0; i < tmpl.size(); ++i) {
            if (done[i]) continue;
            std::vector<size_t> ok;
            for (size_t c : cand[i])
                if (compatible(i, c)) ok.push_back(c);
            if (ok.size() < best_n) {
                best = i;
                best_n = ok.size();
                best_ok = std::move(ok);
                if (best_n == 0) return;
            }
        }
        done[best] = true;
        for (size_t c : best_ok) {
            std::vector<std::string> added;
            try_bind(lines[c], tmpl[best], added);
            chosen[best] = c;
            rec(depth + 1);
            undo(added);
            if (stop) break;
        }
        done[best] = false;
    }
};

} // namespace

void match_premise(const Program& tmpl, const Program& lines, const ConstSet& cst, const MatchVisitor& visit,
                   const std::vector<std::vector<size_t>>* allowed) {
    Matcher m{tmpl, lines, cst, visit, {}, {}, {}, {}};
    m.cand.resize(tmpl.size());
    for (size_t i = 0; i < tmpl.size(); ++i) {
        auto& t = tmpl[i];
        auto consider = [&](size_t l) {
            auto& s = lines[l];
            if (s.name == t.name && s.ins.size() == t.ins.size() && s.outs.size() == t.outs.size()) m.cand[i].push_back(l);
        };
        if (allowed) {
            for (size_t l : (*allowed)[i]) consider(l);
        } else {
            for (size_t l = 0; l < lines.size(); ++l) consider(l);
        }
    }
    m.chosen.assign(tmpl.size(), 0);
    m.done.assign(tmpl.size(), false);
    m.rec(0);
}

bool Theory::has_false_sublist(const Program& p) const {
    for (auto& r : rules_) {
        if (!r.is_falsity()) continue;
        bool found = false;
        match_premise(r.premise, p, cst_, [&](const Binding&, const std::vector<size_t>&) {
            found = true;
            return false;
        });
        if (found) return true;
    }
    return false;
}

FalsityTest falsity_test(const Theory& th) {
    return [&th](const Program& p) { return th.has_false_sublist(p); };
}

TokenList tcl_of(const ProofScript& s) {
    TokenList out;
    auto add = [&](const std::string& l) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    };
    for (auto& l : s.lines) {
        if (l.is_premise()) continue;
        add(l.label);
        for (auto& b : l.branches) add(b);
    }
    return out;
}

RuleRecord rule_from_script(const ProofScript& s, const std::string& origin) {
    RuleRecord r;
    r.label = s.label;
    r.kind = s.kind;
    r.premise = s.premise;
    r.conclusion = s.conclusion;
    r.origin = origin;
    if (s.has_proof) r.tcl = tcl_of(s);
    return r;
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("IoError", "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TokenList parse_type_list(std::istringstream& in, const std::string& line) {
    std::string tok;
    in >> tok;
    if (tok.empty() || tok[0] != '[') throw parse_error("expected a type list in `" + line + "`");
    TokenList out;
    std::string rest = tok.substr(1);
    while (true) {
        if (!rest.empty()) {
            bool close = rest.back() == ']';
            if (close) rest.pop_back();
            if (!rest.empty()) out.push_back(rest);
            if (close) return out;
        }
        if (!(in >> rest)) throw parse_error("unterminated type list in `" + line + "`");
        if (rest == "]") return out;
    }
}

void load_manifest(Theory& th, const fs::path& dir, const fs::path& root, std::vector<std::string>& stack) {
    std::istringstream in(read_file(dir / "manifest"));
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::istringstream ls(line);
        std::string cmd;
        if (!(ls >> cmd)) continue;
        if (cmd == "theory") {
            ls >> th.name;
        } else if (cmd == "numeric") {
            ls >> th.numeric;
        } else if (cmd == "include") {
            std::string other;
            ls >> other;
            if (std::find(stack.begin(), stack.end(), other) != stack.end())
                throw Error("InvalidTheory", "include cycle through " + other);
            stack.push_back(other);
            Theory sub = load_theory(root, other, th.mach);
            stack.pop_back();
            th.includes.push_back(other);
            th.merge(sub);
        } else if (cmd == "type") {
            TypeInfo t;
            ls >> t.name >> t.check_atom >> t.eq_atom;
            th.add_type(t);
        } else if (cmd == "const") {
            ConstInfo c;
            ls >> c.name >> c.type;
            std::string rest;
            std::getline(ls, rest);
            if (rest.find('[') != std::string::npos) c.program = parse_statement_run(rest);
            th.add_const(c);
        } else if (cmd == "atom") {
            AtomSig a;
            std::string kind;
            ls >> a.name >> kind;
            if (kind == "chck") a.kind = AtomKind::Chck;
            else if (kind == "asgn") a.kind = AtomKind::Asgn;
            else if (kind == "tasgn") a.kind = AtomKind::Tasgn;
            else throw parse_error("unknown atom kind `" + kind + "`");
            a.in_types = parse_type_list(ls, line);
            a.out_types = parse_type_list(ls, line);
            std::string flag;
            while (ls >> flag) {
                if (flag == "sr") a.substitutable = true;
                else if (flag == "eval") a.has_hook = true;
                else throw parse_error("unknown atom flag `" + flag + "`");
            }
            th.add_atom(a);
        } else {
            throw parse_error("unknown manifest entry `" + cmd + "`");
        }
    }
}

} // namespace

Theory load_theory(const fs::path& dir, const std::string& name, const MachParams& mach) {
    fs::path td = dir / name;
    if (!fs::exists(td / "manifest")) throw Error("UnknownTheory", name);
    Theory th;
    th.name = name;
    th.mach = mach;
    std::vector<std::string> stack{name};
    load_manifest(th, td, dir, stack);
    if (fs::exists(td / "disj.dat")) {
        std::istringstream in(read_file(td / "disj.dat"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) throw parse_error("disjunction needs `=`: " + line);
            Statement head = parse_statement(line.substr(0, eq));
            PSeq body = parse_pseq(line.substr(eq + 1));
            DisjunctionDef d;
            d.name = head.name;
            d.ins = head.ins;
            d.outs = head.outs;
            d.operands = disjunctive_form(body);
            th.add_disjunction(std::move(d));
        }
    }
    for (const char* f : {"axiom.dat", "theorem.dat"}) {
        if (!fs::exists(td / f)) continue;
        for (auto& s : parse_scripts(read_file(td / f), mach.nstr)) th.store_rule(rule_from_script(s, name));
    }
    for (auto& r : th.rules())
        for (auto& l : r.tcl)
            if (!is_automated_label(l) && !th.rule(l))
                throw Error("InvalidTheory", r.label + " cites unknown label " + l);
    return th;
}

std::vector<std::string> list_theories(const fs::path& dir) {
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && fs::exists(e.path() / "manifest")) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string render_rule(const RuleRecord& r) { return render_block(r.kind, r.label, r.premise, r.conclusion); }

} // namespace pecr
