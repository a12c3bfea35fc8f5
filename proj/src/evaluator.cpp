#include "pecr/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pecr {

namespace {

int64_t pow10(int64_t d) {
    int64_t p = 1;
    while (d-- > 0) p *= 10;
    return p;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string render_ints(const std::vector<int64_t>& v) {
    std::string out = "[";
    for (size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + std::to_string(v[k]);
    return out + "]";
}

[[noreturn]] void fail(const std::string& kind, const std::string& detail) { throw ExecFailure{kind, detail}; }

const char* variant_name(const Value& v) {
    static const char* names[] = {"int", "rat", "vec", "box", "prgm", "term"};
    return names[v.index()];
}

template <class T>
const T& as(const Value& v, const char* what) {
    if (auto* p = std::get_if<T>(&v)) return *p;
    fail("TypeViolation", std::string("expected ") + what + ", got " + variant_name(v));
}

void same_dim(const Vec& a, const Vec& b) {
    if (a.v.size() != b.v.size())
        fail("DimMismatch", "dimensions " + std::to_string(a.v.size()) + " and " + std::to_string(b.v.size()));
}

int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) fail("Overflow", "addition overflows");
    return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) fail("Overflow", "product overflows");
    return r;
}

} // namespace

std::string render_value(const Value& v, int64_t eps_digits) {
    struct V {
        int64_t d;
        std::string operator()(const Int& i) const { return std::to_string(i.v); }
        std::string operator()(const Rat& r) const {
            int64_t s = pow10(d);
            int64_t a = r.k < 0 ? -r.k : r.k;
            std::string frac = std::to_string(a % s);
            frac.insert(0, (size_t)d - frac.size(), '0');
            return (r.k < 0 ? "-" : "") + std::to_string(a / s) + (d > 0 ? "." + frac : "");
        }
        std::string operator()(const Vec& x) const { return render_ints(x.v); }
        std::string operator()(const Box& b) const { return "[" + render_ints(b.lo.v) + " " + render_ints(b.hi.v) + "]"; }
        std::string operator()(const Prgm& p) const {
            std::string out;
            for (auto& s : p.p) out += (out.empty() ? "" : " ") + to_string(s);
            return out;
        }
        std::string operator()(const Term& t) const { return "\"" + t.s + "\""; }
    };
    return std::visit(V{eps_digits}, v);
}

namespace {

std::vector<int64_t> parse_ints(const std::string& body) {
    std::istringstream in(body);
    std::vector<int64_t> out;
    std::string tok;
    while (in >> tok) {
        size_t used = 0;
        int64_t x = 0;
        try {
            x = std::stoll(tok, &used);
        } catch (...) {
            used = 0;
        }
        if (used != tok.size()) throw parse_error("bad vector element `" + tok + "`");
        out.push_back(x);
    }
    return out;
}

int64_t parse_scaled(const std::string& t, bool rational, int64_t d) {
    size_t dot = t.find('.');
    if (!rational && dot != std::string::npos) throw parse_error("decimal literal in an int theory: " + t);
    std::string ip = dot == std::string::npos ? t : t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    auto digits = [](const std::string& s) { return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit((unsigned char)c); }); };
    if (!digits(ip) || !digits(fp)) throw parse_error("bad number `" + t + "`");
    if (!rational) return (neg ? -1 : 1) * std::stoll(ip);
    if ((int64_t)fp.size() > d) throw parse_error("`" + t + "` is finer than the rat resolution");
    fp.append((size_t)d - fp.size(), '0');
    int64_t k = std::stoll(ip) * pow10(d) + (fp.empty() ? 0 : std::stoll(fp));
    return neg ? -k : k;
}

} // namespace

Value parse_value(const std::string& text, bool rational, int64_t eps_digits) {
    std::string t = trim(text);
    if (t.empty()) throw parse_error("empty value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"') throw parse_error("unterminated term " + t);
        return Term{t.substr(1, t.size() - 2)};
    }
    if (t.rfind("[[", 0) == 0) {
        auto mid = t.find(']');
        auto open2 = t.find('[', mid);
        auto close2 = t.find(']', open2);
        if (mid == std::string::npos || open2 == std::string::npos || close2 == std::string::npos || trim(t.substr(close2 + 1)) != "]")
            throw parse_error("bad box `" + t + "`");
        Box b{Vec{parse_ints(t.substr(2, mid - 2))}, Vec{parse_ints(t.substr(open2 + 1, close2 - open2 - 1))}};
        if (b.lo.v.size() != b.hi.v.size() || b.lo.v.empty()) throw parse_error("box bounds differ in dimension");
        for (size_t k = 0; k < b.lo.v.size(); ++k)
            if (b.lo.v[k] > b.hi.v[k]) throw parse_error("box lower bound exceeds upper bound");
        return b;
    }
    if (t.front() == '[') {
        if (t.back() != ']') throw parse_error("bad vector `" + t + "`");
        Vec v{parse_ints(t.substr(1, t.size() - 2))};
        if (v.v.empty()) throw parse_error("empty vector");
        return v;
    }
    if (std::isalpha((unsigned char)t.front()) && t.find('[') != std::string::npos) return Prgm{parse_statement_run(t)};
    if (rational) return Rat{parse_scaled(t, true, eps_digits)};
    return Int{parse_scaled(t, false, eps_digits)};
}

Env parse_env(const std::string& text, bool rational, int64_t eps_digits) {
    Env env;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw parse_error("expected `name = value`: " + line);
        std::string name = trim(line.substr(0, eq));
        if (!is_variable_name(name)) throw parse_error("bad variable name `" + name + "`");
        if (env.count(name)) throw parse_error("variable assigned twice: " + name);
        env.emplace(name, parse_value(line.substr(eq + 1), rational, eps_digits));
    }
    return env;
}

std::string render_env(const Env& e, int64_t eps_digits) {
    std::string out;
    for (auto& [k, v] : e) out += k + " = " + render_value(v, eps_digits) + "\n";
    return out;
}

std::string ExecError::str() const { return kind + " at statement " + std::to_string(site + 1) + ": " + detail; }

std::vector<int64_t> CellularAutomaton::step(const std::vector<int64_t>& v) const {
    size_t m = v.size();
    std::vector<int64_t> w(m);
    auto bit = [&](size_t i) { return (int)(((v[i] % 2) + 2) % 2); };
    for (size_t i = 0; i < m; ++i) {
        int idx = 4 * bit((i + m - 1) % m) + 2 * bit(i) + bit((i + 1) % m);
        w[i] = (rule >> idx) & 1;
    }
    return w;
}

Evaluator::Evaluator(const Theory& th, const MachParams& mach) : th_(th), mach_(mach) {
    mach_.validate();
    bool rat = rational();
    int64_t scale = pow10(mach_.eps_digits);
    auto num = [rat](const Value& v) -> int64_t { return rat ? as<Rat>(v, "rat").k : as<Int>(v, "int").v; };
    auto mk = [rat](int64_t x) -> Value { return rat ? Value(Rat{x}) : Value(Int{x}); };
    auto rel = [](bool ok, const std::string& what) {
        if (!ok) fail("RelationFailure", what);
        return std::vector<Value>{};
    };

    hooks_["typei"] = [num](auto& in, Evaluator& e) {
        e.bound(num(in[0]));
        return std::vector<Value>{};
    };
    hooks_["eqi"] = [num, rel](auto& in, Evaluator&) { return rel(num(in[0]) == num(in[1]), "values differ"); };
    hooks_["lt"] = [num, rel](auto& in, Evaluator&) { return rel(num(in[0]) < num(in[1]), "not less"); };
    hooks_["add"] = [num, mk](auto& in, Evaluator& e) {
        return std::vector<Value>{mk(e.bound(checked_add(num(in[0]), num(in[1]))))};
    };
    hooks_["mult"] = [num, mk, rat, scale](auto& in, Evaluator& e) {
        int64_t p = checked_mul(num(in[0]), num(in[1]));
        if (rat) {
            if (p % scale != 0) fail("Overflow", "product underflows the rat resolution");
            p /= scale;
        }
        return std::vector<Value>{mk(e.bound(p))};
    };
    hooks_["div"] = [num, mk, rat, scale](auto& in, Evaluator& e) {
        int64_t a = num(in[0]), b = num(in[1]);
        if (b == 0) fail("DivisionError", "division by zero");
        if (rat) a = checked_mul(a, scale);
        if (a % b != 0) fail("DivisionError", "divisor does not divide exactly");
        return std::vector<Value>{mk(e.bound(a / b))};
    };

    auto vec = [](const Value& v) -> const Vec& { return as<Vec>(v, "vec"); };
    auto box = [](const Value& v) -> const Box& { return as<Box>(v, "box"); };
    auto elementwise = [vec](auto& in, auto cmp, const char* what) {
        const Vec& a = vec(in[0]);
        const Vec& b = vec(in[1]);
        same_dim(a, b);
        for (size_t k = 0; k < a.v.size(); ++k)
            if (!cmp(a.v[k], b.v[k])) fail("RelationFailure", std::string(what) + " fails at element " + std::to_string(k + 1));
        return std::vector<Value>{};
    };
    hooks_["typev"] = [vec](auto& in, Evaluator& e) {
        const Vec& a = vec(in[0]);
        if (a.v.empty() || (int64_t)a.v.size() > e.mach().nlst) fail("TypeViolation", "vector dimension out of range");
        for (auto x : a.v) e.bound(x);
        return std::vector<Value>{};
    };
    hooks_["eqv"] = [elementwise](auto& in, Evaluator&) { return elementwise(in, std::equal_to<>(), "eqv"); };
    hooks_["ltv"] = [elementwise](auto& in, Evaluator&) { return elementwise(in, std::less<>(), "ltv"); };
    hooks_["lev"] = [elementwise](auto& in, Evaluator&) { return elementwise(in, std::less_equal<>(), "lev"); };
    hooks_["dim"] = [vec, rel](auto& in, Evaluator&) { return rel(vec(in[0]).v.size() == vec(in[1]).v.size(), "dimensions differ"); };
    hooks_["addv"] = [vec](auto& in, Evaluator& e) {
        const Vec& a = vec(in[0]);
        const Vec& b = vec(in[1]);
        same_dim(a, b);
        Vec c;
        for (size_t k = 0; k < a.v.size(); ++k) c.v.push_back(e.bound(checked_add(a.v[k], b.v[k])));
        return std::vector<Value>{c};
    };
    hooks_["smult"] = [vec](auto& in, Evaluator& e) {
        int64_t s = as<Int>(in[0], "int").v;
        Vec c;
        for (auto x : vec(in[1]).v) c.v.push_back(e.bound(checked_mul(s, x)));
        return std::vector<Value>{c};
    };
    hooks_["zvec"] = [vec](auto& in, Evaluator&) {
        return std::vector<Value>{Vec{std::vector<int64_t>(vec(in[0]).v.size(), 0)}};
    };
    hooks_["typebx"] = [box](auto& in, Evaluator& e) {
        const Box& p = box(in[0]);
        same_dim(p.lo, p.hi);
        for (size_t k = 0; k < p.lo.v.size(); ++k) {
            e.bound(p.lo.v[k]);
            e.bound(p.hi.v[k]);
            if (p.lo.v[k] > p.hi.v[k]) fail("TypeViolation", "box bounds out of order");
        }
        return std::vector<Value>{};
    };
    hooks_["eqbx"] = [box, rel](auto& in, Evaluator&) {
        const Box& p = box(in[0]);
        const Box& q = box(in[1]);
        same_dim(p.lo, q.lo);
        return rel(p == q, "boxes differ");
    };
    hooks_["eltbx"] = [vec, box](auto& in, Evaluator&) {
        const Vec& v = vec(in[0]);
        const Box& p = box(in[1]);
        same_dim(v, p.lo);
        for (size_t k = 0; k < v.v.size(); ++k)
            if (v.v[k] < p.lo.v[k] || v.v[k] > p.hi.v[k]) fail("RelationFailure", "vector outside the box at element " + std::to_string(k + 1));
        return std::vector<Value>{};
    };
    hooks_["subbx"] = [box](auto& in, Evaluator&) {
        const Box& q = box(in[0]);
        const Box& p = box(in[1]);
        same_dim(q.lo, p.lo);
        for (size_t k = 0; k < q.lo.v.size(); ++k)
            if (p.lo.v[k] > q.lo.v[k] || q.hi.v[k] > p.hi.v[k]) fail("RelationFailure", "box not contained at element " + std::to_string(k + 1));
        return std::vector<Value>{};
    };
    hooks_["lbx"] = [box](auto& in, Evaluator&) { return std::vector<Value>{box(in[0]).lo}; };
    hooks_["ubx"] = [box](auto& in, Evaluator&) { return std::vector<Value>{box(in[0]).hi}; };
    hooks_["box"] = [vec](auto& in, Evaluator&) {
        const Vec& a = vec(in[0]);
        const Vec& b = vec(in[1]);
        same_dim(a, b);
        for (size_t k = 0; k < a.v.size(); ++k)
            if (a.v[k] > b.v[k]) fail("RelationFailure", "lower bound exceeds upper bound at element " + std::to_string(k + 1));
        return std::vector<Value>{Box{a, b}};
    };
    hooks_["iterf"] = [vec](auto& in, Evaluator& e) { return std::vector<Value>{e.iterf(vec(in[0]), as<Int>(in[1], "int").v)}; };

    CellularAutomaton ca;
    set_map(
        [ca, vec](auto& in, Evaluator&) { return std::vector<Value>{Vec{ca.step(vec(in[0]).v)}}; },
        [box](auto& in, Evaluator&) {
            const Box& p = box(in[0]);
            for (size_t k = 0; k < p.lo.v.size(); ++k)
                if (p.lo.v[k] > 0 || p.hi.v[k] < 1) fail("RelationFailure", "box does not contain the binary states");
            return std::vector<Value>{p};
        },
        ca.id());
}

void Evaluator::set_map(Hook f, Hook boundf, std::string id) {
    hooks_["f"] = std::move(f);
    hooks_["boundf"] = std::move(boundf);
    map_id_ = std::move(id);
}

bool Evaluator::has_hook(const std::string& atom) const {
    return hooks_.count(atom) || th_.disjunction(atom) != nullptr;
}

int64_t Evaluator::bound(int64_t x) const {
    if (x > mach_.nint || x < -mach_.nint) fail("Overflow", std::to_string(x) + " exceeds nint");
    return x;
}

void Evaluator::charge(int64_t n) {
    steps_ += n;
    if (steps_ > mach_.tcpu) fail("DeadlineExceeded", "budget of " + std::to_string(mach_.tcpu) + " steps exhausted");
}

Value Evaluator::literal(const std::string& tok, const std::string& type) const {
    if (is_numeric(tok)) {
        int64_t x = std::stoll(tok);
        if (type == "rat" || (type.empty() && rational())) return Rat{x * pow10(mach_.eps_digits)};
        return Int{x};
    }
    auto it = th_.const_info().find(tok);
    if (it != th_.const_info().end() && it->second.program) return Prgm{*it->second.program};
    return Term{tok};
}

Value Evaluator::resolve(const std::string& tok, const std::string& type, const Env& env) const {
    if (auto it = env.find(tok); it != env.end()) return it->second;
    if (th_.constants().contains(tok)) return literal(tok, type);
    fail("TypeViolation", "unbound input " + tok);
}

void Evaluator::check_type(const Value& v, const std::string& type, const std::string& where) const {
    if (type.empty()) return;
    size_t want;
    if (type == "int") want = 0;
    else if (type == "rat") want = 1;
    else if (type == "vec") want = 2;
    else if (type == "box") want = 3;
    else if (type == "prgm") want = 4;
    else want = 5;
    if (v.index() != want) fail("TypeViolation", where + " expects " + type + ", got " + variant_name(v));
}

void Evaluator::exec(const Statement& s, Env& env) {
    charge();
    if (auto* d = th_.disjunction(s.name)) {
        (void)d;
        int counter = 0;
        auto ops = th_.operands_of(s, [&] { return "~" + std::to_string(depth_) + "_" + std::to_string(counter++); });
        std::vector<Env> good;
        std::optional<ExecFailure> first;
        ++depth_;
        for (auto& op : ops) {
            Env local = env;
            try {
                for (auto& st : op) exec(st, local);
                good.push_back(std::move(local));
            } catch (const ExecFailure& f) {
                if (f.kind == "DeadlineExceeded") {
                    --depth_;
                    throw;
                }
                if (!first) first = f;
            }
        }
        --depth_;
        if (good.empty()) fail(first ? first->kind : "RelationFailure", "no operand of " + s.name + " computes (" + (first ? first->detail : "") + ")");
        for (auto& y : s.outs)
            for (size_t k = 1; k < good.size(); ++k)
                if (!(good[k].at(y) == good[0].at(y))) fail("DisjunctionViolation", "operands of " + s.name + " disagree on " + y);
        for (auto& y : s.outs) env.emplace(y, good[0].at(y));
        return;
    }
    auto it = hooks_.find(s.name);
    if (it == hooks_.end()) fail("NoEvaluatorHook", s.name);
    std::vector<Value> in;
    for (size_t k = 0; k < s.ins.size(); ++k) {
        std::string ty = th_.position_type(s.name, k, false);
        in.push_back(resolve(s.ins[k], ty, env));
        check_type(in.back(), ty, s.name + " input " + std::to_string(k + 1));
    }
    auto out = it->second(in, *this);
    if (out.size() != s.outs.size()) fail("TypeViolation", s.name + " produced the wrong number of outputs");
    for (size_t k = 0; k < out.size(); ++k) {
        std::string ty = th_.position_type(s.name, k, true);
        check_type(out[k], ty, s.name + " output " + std::to_string(k + 1));
        if (!env.emplace(s.outs[k], out[k]).second) throw Error("Internal", "rebinding " + s.outs[k]);
    }
}

EvalResult Evaluator::eval(const Program& p, const Env& input) {
    EvalResult r;
    r.env = input;
    steps_ = 0;
    depth_ = 0;
    for (size_t k = 0; k < p.size(); ++k) {
        try {
            exec(p[k], r.env);
        } catch (const ExecFailure& f) {
            r.error = ExecError{f.kind, k, f.detail};
            break;
        }
    }
    r.steps = steps_;
    return r;
}

Vec Evaluator::iterf(const Vec& v, int64_t n) {
    if (n < 0) fail("RelationFailure", "iteration count is negative");
    auto it = hooks_.find("f");
    if (it == hooks_.end()) fail("NoEvaluatorHook", "f");
    Vec cur = v;
    for (int64_t t = 1; t <= n; ++t) {
        charge();
        try {
            auto out = it->second({Value(cur)}, *this);
            cur = as<Vec>(out.at(0), "vec");
            for (auto x : cur.v) bound(x);
        } catch (const ExecFailure& f) {
            if (f.kind == "DeadlineExceeded") throw;
            fail(f.kind, f.detail + " (step " + std::to_string(t) + ")");
        }
    }
    return cur;
}

} // namespace pecr
