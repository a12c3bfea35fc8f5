#pragma once
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pecr/core.hpp"
#include "pecr/equivalence.hpp"
#include "pecr/script.hpp"

namespace pecr {

enum class AtomKind { Chck, Asgn, Tasgn };

struct AtomSig {
    std::string name;
    AtomKind kind = AtomKind::Chck;
    std::vector<std::string> in_types, out_types;
    bool substitutable = false;
    bool has_hook = false;  // evaluator implements it
};

struct DisjunctionDef {
    std::string name;
    TokenList ins, outs;
    std::vector<Program> operands;
};

struct TypeInfo {
    std::string name;
    std::string check_atom;  // may be empty
    std::string eq_atom;     // may be empty
};

struct ConstInfo {
    std::string name;
    std::string type;
    std::optional<Program> program;  // for prgm constants given by value
};

struct RuleRecord {
    std::string label;
    RuleKind kind = RuleKind::Axiom;
    Program premise;
    std::optional<Statement> conclusion;  // empty: falsity rule
    TokenList tcl;
    std::string origin;  // theory that supplied it
    bool is_falsity() const { return !conclusion.has_value(); }
    bool is_axiom() const { return kind == RuleKind::Axiom; }
};

// Labels of the automated rules; they never live in the store.
bool is_automated_label(const std::string& l);  // aio, sr1, sr2, disj

class Theory {
public:
    std::string name;
    std::string numeric = "int";  // int or rat literal semantics
    MachParams mach;
    std::vector<std::string> includes;

    const AtomSig* atom(const std::string& n) const;
    const TypeInfo* type(const std::string& n) const;
    const DisjunctionDef* disjunction(const std::string& n) const;
    const RuleRecord* rule(const std::string& label) const;
    const ConstSet& constants() const { return cst_; }
    const std::map<std::string, ConstInfo>& const_info() const { return const_info_; }
    const std::map<std::string, AtomSig>& atoms() const { return atoms_; }
    const std::map<std::string, TypeInfo>& types() const { return types_; }
    const std::map<std::string, DisjunctionDef>& disjunctions() const { return disj_; }
    const std::vector<RuleRecord>& rules() const { return rules_; }
    std::set<std::string> atom_names() const;

    // type of an I/O position, "" when unknown
    std::string position_type(const std::string& atom, size_t pos, bool output) const;
    // type a token carries in a program: taken from the first position it occupies
    std::string token_type(const Program& p, const std::string& tok) const;
    std::string eq_atom_for(const std::string& type) const;
    std::string check_atom_for(const std::string& type) const;
    bool is_eq_atom(const std::string& atom) const;

    void add_atom(AtomSig a);
    void add_type(TypeInfo t);
    void add_const(ConstInfo c);
    void add_disjunction(DisjunctionDef d);
    void store_rule(RuleRecord r);  // Error("DuplicateLabel") if present
    void relabel(const std::string& label, RuleKind kind, const TokenList& tcl = {});
    void remove_rule(const std::string& label);
    void validate_rule(const RuleRecord& r) const;  // throws on invariant breach
    void merge(const Theory& other);                // include

    // operand programs of a disjunction statement; internal outputs renamed
    // with fresh(name) so they do not clash with the surrounding program
    std::vector<Program> operands_of(const Statement& s, const std::function<std::string()>& fresh) const;

    // does a falsity rule's premise match a sublist of p?
    bool has_false_sublist(const Program& p) const;

private:
    std::map<std::string, AtomSig> atoms_;
    std::map<std::string, TypeInfo> types_;
    std::map<std::string, DisjunctionDef> disj_;
    std::map<std::string, ConstInfo> const_info_;
    ConstSet cst_;
    std::vector<RuleRecord> rules_;
    std::map<std::string, size_t> index_;
};

RuleRecord rule_from_script(const ProofScript& s, const std::string& origin);
TokenList tcl_of(const ProofScript& s);

// Loads <dir>/<name>/{manifest,axiom.dat,disj.dat,theorem.dat}, resolving includes.
Theory load_theory(const std::filesystem::path& dir, const std::string& name, const MachParams& mach = {});
std::vector<std::string> list_theories(const std::filesystem::path& dir);

std::string render_rule(const RuleRecord& r);

// does a falsity rule fire on some sublist of p (used by prgm_equiv)
FalsityTest falsity_test(const Theory& th);

// template matching of a rule premise against any lines of a program;
// callback gets the binding and chosen line indices (one per premise statement)
// and returns false to stop the search.
using MatchVisitor = std::function<bool(const Binding&, const std::vector<size_t>&)>;
void match_premise(const Program& tmpl, const Program& lines, const ConstSet& cst, const MatchVisitor& visit,
                   const std::vector<std::vector<size_t>>* allowed = nullptr);

} // namespace pecr
