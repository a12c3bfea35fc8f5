#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pecr/core.hpp"

namespace pecr {

bool is_sublist(const Program& b, const Program& a);
bool prgm_equiv(const Program& u, const Program& v);

// template token -> instance token
using Binding = std::map<std::string, std::string>;

struct Substitution {
    Binding in;   // variables first met in input lists
    Binding out;  // variables bound by template outputs
    Binding all() const;
};

struct MatchFailure {
    int condition = 0;  // 0 shape, 1 equal inputs, 2 bound outputs, 3 constants, 4 injectivity (strict mode)
    size_t position = 0;
    std::string detail;
};

bool is_template_const(const std::string& t, const ConstSet& cst);

// Extends b so that tmpl maps onto inst. On failure b is restored.
bool bind_statement(const Statement& inst, const Statement& tmpl, Binding& b, const ConstSet& cst);

std::optional<Substitution> io_equiv(const Program& instance, const Program& tmpl, const ConstSet& cst,
                                     bool strict = false, MatchFailure* why = nullptr);

Statement apply_binding(const Statement& s, const Binding& b);

// Programs with disjunctions: a sequence of items, each a statement or a
// disjunction of alternative sequences.
struct PItem;
using PSeq = std::vector<PItem>;
struct PItem {
    std::optional<Statement> stmt;
    std::vector<PSeq> alts;
};

// `[p a q] | [p b q]`, `lt [a b] [ ] (x [ ] [ ] | y [ ] [ ])`
PSeq parse_pseq(std::string_view text);
std::vector<Program> disjunctive_form(const PSeq& s);

using FalsityTest = std::function<bool(const Program&)>;
bool prgm_equiv(const PSeq& u, const PSeq& v, const FalsityTest& is_false = {});

} // namespace pecr
