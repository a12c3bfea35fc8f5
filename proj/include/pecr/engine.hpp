#pragma once
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pecr/theory.hpp"

namespace pecr {

// Rules visible to a derivation: the theory store plus session-local lemmas,
// minus hidden labels.
class Context {
public:
    explicit Context(const Theory& th, const std::vector<RuleRecord>& extra = {}, const std::set<std::string>& hidden = {});
    const Theory& theory() const { return th_; }
    const RuleRecord* find(const std::string& label) const;
    const std::vector<const RuleRecord*>& rules() const { return rules_; }

private:
    const Theory& th_;
    std::vector<const RuleRecord*> rules_;
    std::map<std::string, const RuleRecord*> index_;
};

enum class Provenance { Rule, Aio, Sr1, Sr2, Falsity, Disj };

struct Option {
    std::optional<Statement> conclusion;  // empty: FALSE
    std::string label;
    std::vector<int> cl;                // 1-based line labels
    std::vector<std::string> branches;  // disj only
    Provenance prov = Provenance::Rule;

    std::string render() const;  // options.dat line
    std::string hash() const;
    // name, inputs and output count; outputs are always fresh so names do not matter
    std::string shape() const;
};

std::string shape_of(const std::optional<Statement>& s);

class FreshNames {
public:
    FreshNames(const Program& used, const ConstSet& cst);
    void reserve(const std::string& n) { used_.insert(n); }
    bool is_used(const std::string& n) const { return used_.count(n) > 0; }
    std::string next();

private:
    std::set<std::string> used_;
    const ConstSet& cst_;
    size_t counter_ = 0;
};

// One-step consequences of a derivation. label filters to a single rule
// (including aio/sr1/sr2); empty means all stored rules plus aio/sr1/sr2.
std::vector<Option> one_step(const Context& ctx, const Program& d, const std::string& label = "");

std::vector<Option> rule_options(const Context& ctx, const Program& d, const RuleRecord& r);
std::vector<Option> aio_options(const Theory& th, const Program& d, const std::vector<size_t>* only = nullptr);
std::vector<Option> sr1_options(const Theory& th, const Program& d);
std::vector<Option> sr2_options(const Theory& th, const Program& d);

// Disjunction contraction over the split line (0-based index) of d.
struct BranchResult {
    bool is_false = false;
    Option via;  // option in the operand derivation, cl in operand numbering
};
struct Contraction {
    std::optional<Statement> conclusion;  // empty when both branches are false
    std::vector<BranchResult> branch;
    std::vector<int> cl;  // support in d numbering (1-based)
};
// Contractions of `c disj [A B]` for c in candidates (or any c if target empty)
std::vector<Contraction> contractions(const Context& ctx, const Program& d, size_t split_line,
                                      const std::vector<std::string>& labels,
                                      const std::optional<std::optional<Statement>>& target = std::nullopt);
std::vector<Option> disj_options(const Context& ctx, const Program& d, const std::vector<size_t>& split_lines,
                                 const std::set<std::string>* skip_shapes = nullptr);

// Program of the statement lines (`:false` lines excluded).
Program statements_of(const std::vector<ProofLine>& lines);

struct LineVerdict {
    bool ok = true;
    std::string kind;  // UnknownLabel, BadConnectionList, NotFresh, NoMatch, ...
    std::string message;
    std::vector<int> support;  // lines the step actually used (1-based)
};

// Verifies lines[k] against lines[0..k).
LineVerdict verify_line(const Context& ctx, const std::vector<ProofLine>& lines, size_t k);

enum class SessionStatus { Open, Concluded, False };
const char* status_name(SessionStatus s);

class Session {
public:
    Session() = default;
    Session(std::shared_ptr<const Theory> th, const Program& premises, const std::vector<bool>& stars = {});

    std::shared_ptr<const Theory> theory;
    std::vector<ProofLine> lines;
    std::vector<RuleRecord> extra;  // lemmas usable here (e.g. from operand branches)
    std::set<std::string> hidden;
    SessionStatus status = SessionStatus::Open;
    size_t premise_count = 0;

    Context context() const { return Context(*theory, extra, hidden); }
    Program program() const { return statements_of(lines); }

    std::vector<Option> enumerate_options() const;
    std::vector<Option> detect_falsity() const;
    // re-verifies; outputs colliding with existing names are renamed
    const ProofLine& apply_option(const Option& opt);
    // `stmt` or `stmt  label [cl]`
    const ProofLine& apply_literal(const std::string& text);
    // marks the line and returns one operand session per operand
    std::vector<std::shared_ptr<Session>> split(int line);
    // operand sessions created by split, keyed by line number
    std::map<int, std::vector<std::shared_ptr<Session>>> children;
    const ProofLine& contract(int line, const std::string& a, const std::string& b,
                              const std::optional<std::string>& statement = std::nullopt);

    ProofScript to_script(RuleKind kind, const std::string& label) const;
};

std::vector<Option> auto_sr(const Session& s);

} // namespace pecr
