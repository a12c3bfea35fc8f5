#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pecr/evaluator.hpp"

namespace pecr {

struct Interval {
    int64_t lo = 0, hi = 0;
    bool operator==(const Interval&) const = default;
    bool within(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
};

// Interval arithmetic on discrete intervals; Overflow when a corner leaves [-nint, nint].
Interval iadd(const Interval& a, const Interval& b, int64_t nint);
Interval isub(const Interval& a, const Interval& b, int64_t nint);
Interval imul(const Interval& a, const Interval& b, int64_t nint);

// Per-coordinate expression over the input vector.
struct Expr {
    enum class Op { Var, Const, Add, Mult, Smult };
    Op op = Op::Const;
    int64_t k = 0;   // Const value or Smult scalar
    size_t var = 0;  // Var index
    std::shared_ptr<const Expr> a, b;

    int64_t eval(const std::vector<int64_t>& x, int64_t nint) const;
    Interval bound(const Box& p, int64_t nint) const;
    std::string str() const;
};
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr var(size_t i);
ExprPtr cst(int64_t k);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr smul(int64_t k, ExprPtr a);

struct Map {
    std::vector<ExprPtr> coords;  // output dim = coords.size(); input dim = dim
    size_t dim = 1;

    Vec apply(const Vec& v, int64_t nint) const;
    Box boundf(const Box& p, int64_t nint) const;  // interval enclosure of the range
    std::string str() const;
};

// Random compositions of add/mult/smult over dim variables.
Map random_map(std::mt19937_64& rng, size_t dim, int depth);

// Exact per-coordinate range by enumeration; Error("CapExceeded") past cap points.
using VecFn = std::function<Vec(const Vec&)>;
Box range_oracle(const VecFn& f, const Box& p, uint64_t cap = 1000000);
uint64_t lattice_points(const Box& p);
bool box_within(const Box& inner, const Box& outer);

void use_map(Evaluator& ev, const Map& m);
void use_automaton(Evaluator& ev, const CellularAutomaton& ca);
Box binary_cube(size_t m);

struct Certificate {
    std::string theory;
    MachParams mach;
    std::string map_id;
    Box p, q;
    Vec v;
    int64_t n = 0;
    int64_t validated_steps = 0;
    std::string digest;
    std::string text() const;
};

// q := boundf(p); requires q within p and v in p. Throws Error("NotEnclosed")
// or Error("NotElement"); spot-validates iterf up to the budget.
Certificate certify_axc5(Evaluator& ev, const Box& p, const Vec& v, int64_t n);
bool verify_certificate(const Certificate& c);

} // namespace pecr
