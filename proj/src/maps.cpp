#include "pecr/maps.hpp"

#include <algorithm>
#include <limits>

namespace pecr {

namespace {

int64_t in_range(__int128 x, int64_t nint) {
    if (x > nint || x < -nint) throw ExecFailure{"Overflow", "interval corner exceeds nint"};
    return (int64_t)x;
}

std::string ints(const std::vector<int64_t>& v) {
    std::string out = "[";
    for (size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + std::to_string(v[k]);
    return out + "]";
}

std::string box_str(const Box& b) { return "[" + ints(b.lo.v) + " " + ints(b.hi.v) + "]"; }

} // namespace

Interval iadd(const Interval& a, const Interval& b, int64_t nint) {
    return {in_range((__int128)a.lo + b.lo, nint), in_range((__int128)a.hi + b.hi, nint)};
}

Interval isub(const Interval& a, const Interval& b, int64_t nint) {
    return {in_range((__int128)a.lo - b.hi, nint), in_range((__int128)a.hi - b.lo, nint)};
}

Interval imul(const Interval& a, const Interval& b, int64_t nint) {
    __int128 c[4] = {(__int128)a.lo * b.lo, (__int128)a.lo * b.hi, (__int128)a.hi * b.lo, (__int128)a.hi * b.hi};
    return {in_range(*std::min_element(c, c + 4), nint), in_range(*std::max_element(c, c + 4), nint)};
}

int64_t Expr::eval(const std::vector<int64_t>& x, int64_t nint) const {
    switch (op) {
    case Op::Var: return x.at(var);
    case Op::Const: return k;
    case Op::Add: return in_range((__int128)a->eval(x, nint) + b->eval(x, nint), nint);
    case Op::Mult: return in_range((__int128)a->eval(x, nint) * b->eval(x, nint), nint);
    default: return in_range((__int128)k * a->eval(x, nint), nint);
    }
}

Interval Expr::bound(const Box& p, int64_t nint) const {
    switch (op) {
    case Op::Var: return {p.lo.v.at(var), p.hi.v.at(var)};
    case Op::Const: return {k, k};
    case Op::Add: return iadd(a->bound(p, nint), b->bound(p, nint), nint);
    case Op::Mult: return imul(a->bound(p, nint), b->bound(p, nint), nint);
    default: return imul({k, k}, a->bound(p, nint), nint);
    }
}

std::string Expr::str() const {
    switch (op) {
    case Op::Var: return "x" + std::to_string(var);
    case Op::Const: return std::to_string(k);
    case Op::Add: return "(" + a->str() + "+" + b->str() + ")";
    case Op::Mult: return "(" + a->str() + "*" + b->str() + ")";
    default: return std::to_string(k) + "." + a->str();
    }
}

ExprPtr var(size_t i) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Var;
    e->var = i;
    return e;
}
ExprPtr cst(int64_t k) {
    auto e = std::make_shared<Expr>();
    e->k = k;
    return e;
}
ExprPtr add(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Add;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
ExprPtr mul(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Mult;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
ExprPtr smul(int64_t k, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Smult;
    e->k = k;
    e->a = std::move(a);
    return e;
}

Vec Map::apply(const Vec& v, int64_t nint) const {
    if (v.v.size() != dim) throw ExecFailure{"DimMismatch", "map expects dimension " + std::to_string(dim)};
    Vec w;
    for (auto& c : coords) w.v.push_back(c->eval(v.v, nint));
    return w;
}

Box Map::boundf(const Box& p, int64_t nint) const {
    if (p.lo.v.size() != dim) throw ExecFailure{"DimMismatch", "map expects dimension " + std::to_string(dim)};
    Box q;
    for (auto& c : coords) {
        Interval i = c->bound(p, nint);
        q.lo.v.push_back(i.lo);
        q.hi.v.push_back(i.hi);
    }
    return q;
}

std::string Map::str() const {
    std::string out = "map(";
    for (size_t k = 0; k < coords.size(); ++k) out += (k ? ", " : "") + coords[k]->str();
    return out + ")";
}

namespace {

ExprPtr random_expr(std::mt19937_64& rng, size_t dim, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    std::uniform_int_distribution<size_t> v(0, dim - 1);
    std::uniform_int_distribution<int64_t> k(-3, 3);
    switch (pick(rng)) {
    case 0: return var(v(rng));
    case 1: return rng() % 3 == 0 ? cst(k(rng)) : var(v(rng));
    case 2: return add(random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    case 3: return mul(random_expr(rng, dim, depth - 1), random_expr(rng, dim, depth - 1));
    default: return smul(k(rng), random_expr(rng, dim, depth - 1));
    }
}

} // namespace

Map random_map(std::mt19937_64& rng, size_t dim, int depth) {
    Map m;
    m.dim = dim;
    for (size_t k = 0; k < dim; ++k) m.coords.push_back(random_expr(rng, dim, depth));
    return m;
}

uint64_t lattice_points(const Box& p) {
    uint64_t n = 1;
    for (size_t k = 0; k < p.lo.v.size(); ++k) {
        uint64_t w = (uint64_t)(p.hi.v[k] - p.lo.v[k]) + 1;
        if (n > std::numeric_limits<uint64_t>::max() / w) return std::numeric_limits<uint64_t>::max();
        n *= w;
    }
    return n;
}

bool box_within(const Box& inner, const Box& outer) {
    if (inner.lo.v.size() != outer.lo.v.size()) return false;
    for (size_t k = 0; k < inner.lo.v.size(); ++k)
        if (inner.lo.v[k] < outer.lo.v[k] || inner.hi.v[k] > outer.hi.v[k]) return false;
    return true;
}

Box range_oracle(const VecFn& f, const Box& p, uint64_t cap) {
    if (lattice_points(p) > cap) throw Error("CapExceeded", "box has more than " + std::to_string(cap) + " points");
    Vec x = p.lo;
    Box r;
    bool first = true;
    while (true) {
        Vec y = f(x);
        if (first) {
            r.lo = y;
            r.hi = y;
            first = false;
        } else {
            for (size_t k = 0; k < y.v.size(); ++k) {
                r.lo.v[k] = std::min(r.lo.v[k], y.v[k]);
                r.hi.v[k] = std::max(r.hi.v[k], y.v[k]);
            }
        }
        size_t k = 0;
        while (k < x.v.size() && x.v[k] == p.hi.v[k]) x.v[k] = p.lo.v[k], ++k;
        if (k == x.v.size()) break;
        ++x.v[k];
    }
    return r;
}

void use_map(Evaluator& ev, const Map& m) {
    ev.set_map(
        [m](const std::vector<Value>& in, Evaluator& e) {
            return std::vector<Value>{m.apply(std::get<Vec>(in.at(0)), e.mach().nint)};
        },
        [m](const std::vector<Value>& in, Evaluator& e) {
            return std::vector<Value>{m.boundf(std::get<Box>(in.at(0)), e.mach().nint)};
        },
        m.str());
}

void use_automaton(Evaluator& ev, const CellularAutomaton& ca) {
    ev.set_map(
        [ca](const std::vector<Value>& in, Evaluator&) { return std::vector<Value>{Vec{ca.step(std::get<Vec>(in.at(0)).v)}}; },
        [](const std::vector<Value>& in, Evaluator&) {
            const Box& p = std::get<Box>(in.at(0));
            for (size_t k = 0; k < p.lo.v.size(); ++k)
                if (p.lo.v[k] > 0 || p.hi.v[k] < 1) throw ExecFailure{"RelationFailure", "box does not contain the binary states"};
            return std::vector<Value>{p};
        },
        ca.id());
}

Box binary_cube(size_t m) { return Box{Vec{std::vector<int64_t>(m, 0)}, Vec{std::vector<int64_t>(m, 1)}}; }

namespace {

std::string body(const Certificate& c) {
    std::string out;
    out += "theory " + c.theory + "\n";
    out += "mach nint=" + std::to_string(c.mach.nint) + " nlst=" + std::to_string(c.mach.nlst) +
           " tcpu=" + std::to_string(c.mach.tcpu) + " eps_digits=" + std::to_string(c.mach.eps_digits) + "\n";
    out += "boundf " + c.map_id + "\n";
    out += "p " + box_str(c.p) + "\n";
    out += "q " + box_str(c.q) + "\n";
    out += "v " + ints(c.v.v) + "\n";
    out += "n " + std::to_string(c.n) + "\n";
    out += "validated " + std::to_string(c.validated_steps) + "\n";
    return out;
}

std::string fnv(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

} // namespace

std::string Certificate::text() const { return "certificate axc5\n" + body(*this) + "digest " + digest + "\n"; }

bool verify_certificate(const Certificate& c) { return fnv(body(c)) == c.digest; }

Certificate certify_axc5(Evaluator& ev, const Box& p, const Vec& v, int64_t n) {
    Env env{{"p", p}, {"v", v}};
    Program bound_prog{{"boundf", {"p"}, {"q"}}};
    auto r = ev.eval(bound_prog, env);
    if (!r.ok()) throw Error("NotEnclosed", "boundf fails: " + r.error->str());
    Box q = std::get<Box>(r.env.at("q"));
    if (!box_within(q, p)) throw Error("NotEnclosed", "q = " + box_str(q) + " is not inside p = " + box_str(p));
    if (v.v.size() != p.lo.v.size() || !box_within(Box{v, v}, p)) throw Error("NotElement", "v = " + ints(v.v) + " is not in p");
    Certificate c;
    c.theory = ev.theory().name;
    c.mach = ev.mach();
    c.map_id = ev.map_id();
    c.p = p;
    c.q = q;
    c.v = v;
    c.n = n;
    int64_t run = std::min<int64_t>(n, ev.mach().tcpu);
    ev.reset_budget();
    try {
        ev.iterf(v, run);
    } catch (const ExecFailure& f) {
        throw Error("Internal", "certified iteration failed: " + f.kind + " " + f.detail);
    }
    c.validated_steps = run;
    c.digest = fnv(body(c));
    return c;
}

} // namespace pecr
