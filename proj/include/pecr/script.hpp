#pragma once
#include <optional>
#include <string>
#include <vector>

#include "pecr/core.hpp"

namespace pecr {

enum class RuleKind { Axiom, Lemma, Theorem };
const char* kind_name(RuleKind k);  // "Axiom", "Lemma", "Theorem"
RuleKind parse_kind(const std::string& s);

struct ProofLine {
    int number = 0;
    std::optional<Statement> stmt;  // empty for `:false`
    bool star = false;
    std::string label;  // empty for premise lines
    std::vector<int> cl;
    std::vector<std::string> branches;  // disj [A B]
    bool is_premise() const { return label.empty(); }
};

// One `Axiom/Theorem/Lemma <label>.` block, optionally followed by its proof.
struct ProofScript {
    RuleKind kind = RuleKind::Theorem;
    std::string label;
    Program premise;
    std::optional<Statement> conclusion;  // empty for `:false`
    bool has_proof = false;
    std::vector<ProofLine> lines;
};

ProofLine parse_proof_line(const std::string& raw, int64_t nstr = 64);
std::vector<ProofScript> parse_scripts(const std::string& text, int64_t nstr = 64);
ProofScript parse_single_script(const std::string& text, int64_t nstr = 64);

std::string render_statement_or_false(const std::optional<Statement>& s);
std::string render_block(RuleKind kind, const std::string& label, const Program& premise,
                         const std::optional<Statement>& conclusion);
std::string render_line(const ProofLine& l);
std::string render_script(const ProofScript& s);  // block plus `Proof.` section

} // namespace pecr
