#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pecr/theory.hpp"

namespace pecr {

struct Int {
    int64_t v = 0;
    bool operator==(const Int&) const = default;
};
struct Rat {
    int64_t k = 0;  // value k * 10^-eps_digits
    bool operator==(const Rat&) const = default;
};
struct Vec {
    std::vector<int64_t> v;
    bool operator==(const Vec&) const = default;
};
struct Box {
    Vec lo, hi;
    bool operator==(const Box&) const = default;
};
struct Prgm {
    Program p;
    bool operator==(const Prgm&) const = default;
};
struct Term {
    std::string s;
    bool operator==(const Term&) const = default;
};
using Value = std::variant<Int, Rat, Vec, Box, Prgm, Term>;
using Env = std::map<std::string, Value>;

std::string render_value(const Value& v, int64_t eps_digits = 3);
// `42`, `-0.125` (rat), `[1 2 3]`, `[[0 0] [4 4]]`, `"text"`, or a statement run
Value parse_value(const std::string& text, bool rational, int64_t eps_digits = 3);
// `name = value` lines; `#` starts a comment
Env parse_env(const std::string& text, bool rational, int64_t eps_digits = 3);
std::string render_env(const Env& e, int64_t eps_digits = 3);

struct ExecError {
    std::string kind;  // TypeViolation, Overflow, DivisionError, DimMismatch, RelationFailure, DisjunctionViolation, DeadlineExceeded, NoEvaluatorHook
    size_t site = 0;   // 0-based statement index
    std::string detail;
    std::string str() const;
};

// Thrown by hooks; eval converts it to an ExecError at the current site.
struct ExecFailure {
    std::string kind;
    std::string detail;
};

struct EvalResult {
    std::optional<ExecError> error;
    Env env;
    int64_t steps = 0;
    bool ok() const { return !error; }
};

class Evaluator;
using Hook = std::function<std::vector<Value>(const std::vector<Value>&, Evaluator&)>;

// Binary cellular automaton on a ring: cell i reads (i-1, i, i+1); entries are
// taken mod 2 so every integer vector is a valid state.
struct CellularAutomaton {
    int rule = 90;
    std::vector<int64_t> step(const std::vector<int64_t>& v) const;
    std::string id() const { return "ca" + std::to_string(rule); }
};

class Evaluator {
public:
    Evaluator(const Theory& th, const MachParams& mach);

    const Theory& theory() const { return th_; }
    const MachParams& mach() const { return mach_; }
    bool rational() const { return th_.numeric == "rat"; }

    void set_hook(const std::string& atom, Hook h) { hooks_[atom] = std::move(h); }
    bool has_hook(const std::string& atom) const;
    // atom f and its bound map; defaults to the rule-90 automaton with identity bound
    void set_map(Hook f, Hook boundf, std::string id);
    const std::string& map_id() const { return map_id_; }

    EvalResult eval(const Program& p, const Env& input);
    // n-fold application of f; failures carry the step number
    Vec iterf(const Vec& v, int64_t n);

    // budget bookkeeping shared by eval and iterf
    void charge(int64_t n = 1);
    void reset_budget() { steps_ = 0; }
    int64_t steps() const { return steps_; }

    int64_t bound(int64_t x) const;  // Overflow unless |x| <= nint
    Value literal(const std::string& tok, const std::string& type) const;

private:
    void exec(const Statement& s, Env& env);
    Value resolve(const std::string& tok, const std::string& type, const Env& env) const;
    void check_type(const Value& v, const std::string& type, const std::string& where) const;

    const Theory& th_;
    MachParams mach_;
    std::map<std::string, Hook> hooks_;
    std::string map_id_;
    int64_t steps_ = 0;
    int depth_ = 0;
};

} // namespace pecr
