#pragma once
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pecr/evaluator.hpp"
#include "pecr/kernel.hpp"

namespace pecr {

struct SoundnessVerdict {
    std::string label;
    int64_t samples = 0;   // environments drawn
    int64_t computed = 0;  // of which the premise computed
    std::optional<Env> counterexample;
    std::optional<ExecError> error;  // failure of [premise conclusion] on the counterexample
    bool violation() const { return counterexample.has_value(); }
    std::string str() const;
};

// Draws type-valid environments for the free variables of a program.
class Sampler {
public:
    Sampler(const Theory& th, const MachParams& mach, uint64_t seed);
    Env draw(const Program& p);
    std::mt19937_64& rng() { return rng_; }

private:
    int64_t scalar();
    std::vector<int64_t> vec(size_t dim);
    const Theory& th_;
    MachParams mach_;
    std::mt19937_64 rng_;
};

// Throws Error("NoEvaluatorHook") when an atom of the rule cannot be evaluated.
// `setup` may install a map model on the evaluator before sampling.
SoundnessVerdict soundness_sample(const RuleRecord& r, const Theory& th, int64_t samples, const MachParams& mach,
                                  uint64_t seed, const std::function<void(Evaluator&)>& setup = {});
// Re-runs [premise conclusion] on the counterexample; the error must repeat.
std::optional<ExecError> replay(const RuleRecord& r, const Theory& th, const Env& env, const MachParams& mach,
                                const std::function<void(Evaluator&)>& setup = {});

// Removes the rule and every theorem depending on it; returns the removed labels.
std::vector<std::string> purge(const std::string& label, Theory& th);

// Same premise up to order and renaming, same conclusion up to renaming.
bool rules_equivalent(const RuleRecord& a, const RuleRecord& b, const ConstSet& cst);

struct SweepReport {
    std::vector<std::pair<std::string, std::string>> relabeled;  // axiom, theorem with the same content
    std::vector<std::pair<std::string, std::string>> flagged;    // equivalent axiom pairs, left alone
    bool modified() const { return !relabeled.empty(); }
};
SweepReport relabel_sweep(Theory& th);

struct SearchCaps {
    size_t max_atoms = 5;
    size_t max_premise = 3;
    int64_t samples = 200;
    size_t max_candidates = 2000000;
    size_t max_constants = 1;  // constant occurrences per candidate
};
struct SearchResult {
    std::vector<RuleRecord> survivors;
    size_t enumerated = 0;
    size_t structural = 0;  // passed the structural filter
    size_t sound = 0;       // passed sampling
};
// Enumerates [premise conclusion] over the atoms, keeps sound candidates that the
// store cannot derive in two extension steps. Error("CapExceeded") past the caps.
SearchResult search_axioms(const Theory& store, const std::vector<std::string>& atoms, size_t max_premise,
                           const MachParams& mach, uint64_t seed, const SearchCaps& caps = {});
bool derivable_within(const Theory& store, const RuleRecord& r, int steps);

struct IterationReport {
    std::vector<std::string> violated;
    std::vector<std::string> purged;
    SweepReport sweep;
    std::vector<RuleRecord> proposals;
};
// Round-robin pass over sampling, purge, relabel and (optionally) search.
std::vector<IterationReport> iterate(Theory& th, int rounds, int64_t samples, const MachParams& mach, uint64_t seed,
                                     const std::vector<std::string>& search_atoms = {});

} // namespace pecr
