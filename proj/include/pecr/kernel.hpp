#pragma once
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pecr/engine.hpp"

namespace pecr {

struct LineReport {
    int number = 0;
    bool ok = true;
    std::string kind;
    std::string message;
};

// Connection-list reduction of a proof.
struct ClReduction {
    std::vector<int> support;            // premise labels the final line rests on
    std::vector<int> r;                  // lines never reached from the final line
    std::vector<int> unused_premises;    // part of r
    std::vector<int> unreachable_lines;  // part of r
};

struct VerificationReport {
    std::string label;
    bool ok = true;
    std::vector<LineReport> lines;
    std::vector<std::string> errors;        // script-level failures
    std::vector<std::vector<int>> supports;  // per line, 1-based; empty for premises
    ClReduction reduction;
    std::optional<RuleRecord> theorem;  // set when ok and r is empty
    int first_failure() const;           // line number, 0 if none
};

// Verifies one script against the context.
VerificationReport check_proof(const ProofScript& s, const Context& ctx);

// Scripts ordered so that cited labels defined in the set come first.
std::vector<size_t> citation_order(const std::vector<ProofScript>& scripts);

// Verifies scripts in citation order (reports keep input order); each verified script becomes citable by later ones
// and shadows a stored rule with the same label. A script never sees itself or
// stored theorems that depend on it.
std::vector<VerificationReport> check_scripts(const std::vector<ProofScript>& scripts, const Theory& th);

ClReduction reduce_connections(const ProofScript& s, const std::vector<std::vector<int>>& supports);

struct Extraction {
    RuleRecord rule;
    std::optional<ProofScript> pruned;  // set when redundant lines were removed
    std::map<int, int> remap;           // old line -> new line
};

// Throws Error("RedundancyRefusal") listing r unless force is set.
Extraction extract_theorem(const ProofScript& s, const VerificationReport& rep, bool force = false);

// Expands theorem labels through their tcl down to axioms and automated markers.
std::set<std::string> reduce_theorem_connections(const std::string& label, const Theory& th);
std::set<std::string> dependents_of(const std::string& label, const Theory& th);

// Session holding a partial proof: premises plus its verified lines. The
// script's own label and its dependents are hidden. Error("VerificationFailure")
// names the first line that does not verify.
Session session_from_script(std::shared_ptr<const Theory> th, const ProofScript& s);

} // namespace pecr
