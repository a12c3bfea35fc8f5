#pragma once
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pecr/error.hpp"

namespace pecr {

struct MachParams {
    int64_t nchar = 38;
    int64_t nstr = 32;
    int64_t nlst = 256;
    int64_t nint = 1000;
    int64_t nprem = 12;
    int64_t tcpu = 1000000;  // statement executions, see eval
    int64_t eps_digits = 3;  // rat resolution 10^-eps_digits

    void validate() const;
};

using Token = std::string;
using TokenList = std::vector<Token>;

bool is_numeric(std::string_view t);
bool is_variable_name(std::string_view t);

struct Statement {
    std::string name;
    TokenList ins;
    TokenList outs;

    bool operator==(const Statement&) const = default;
    auto operator<=>(const Statement&) const = default;
};

using Program = std::vector<Statement>;

// Constants of a theory; numeric literals -1, 0, 1 are always constants.
class ConstSet {
public:
    ConstSet() = default;
    explicit ConstSet(const std::set<std::string>& named) : named_(named.begin(), named.end()) {}
    bool contains(std::string_view t) const;
    void add(const std::string& t) { named_.insert(t); }
    const std::set<std::string, std::less<>>& named() const { return named_; }

private:
    std::set<std::string, std::less<>> named_;
};

Statement parse_statement(std::string_view line, int64_t nstr = 64);
std::string to_string(const Statement& s);
std::string to_string(const Program& p);  // one statement per line
Program parse_program(std::string_view text, int64_t nstr = 64);

// Parses a sequence of statements written on one line, e.g. a disjunction operand.
Program parse_statement_run(std::string_view text, int64_t nstr = 64);

struct StructuralIssue {
    enum class Kind { DuplicateOutput, ForwardBinding, ConstantAsOutput, SelfBinding, UnknownAtom, RepeatedEmptyOutput, IllegalLiteral };
    Kind kind;
    std::string var;
    std::vector<size_t> lines;  // 0-based
    std::string str() const;
};

struct Validation {
    std::vector<StructuralIssue> errors;
    std::vector<StructuralIssue> warnings;
    bool ok() const { return errors.empty(); }
};

// known_atoms may be null; when given, statement names must be in it.
Validation validate_program(const Program& p, const ConstSet& cst, const std::set<std::string>* known_atoms = nullptr);

TokenList piv(const Program& p);
TokenList free_vars(const Program& p, const ConstSet& cst);
TokenList io_names(const Program& p);  // all I/O tokens, first-occurrence order

// [p q]; throws Error("NameClash") if q's outputs hit any I/O name of p.
Program concat(const Program& p, const Program& q, const ConstSet& cst);

TokenList unique(const TokenList& a);
TokenList setminus(const TokenList& a, const TokenList& b);
TokenList intersection(const TokenList& a, const TokenList& b);
TokenList substitute(const TokenList& a, const Token& from, const Token& to);

} // namespace pecr
