#ifndef KB_TRANSLATE_HPP
#define KB_TRANSLATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "kb/autgroup.hpp"
#include "kb/galois.hpp"

namespace kb {

/// Replaces every relation atom of `phi` (over `src`) by its defining
/// formula (over `dst`) with the parameters substituted by the atom's
/// argument terms. Bound variables of a definition are renamed fresh per
/// occurrence so no argument variable is captured. Connectives and
/// equalities pass through unchanged. Throws ContractError when a used
/// relation has no definition.
Formula translate_formula(const Interpretation& beta, const Signature& src, const Signature& dst,
                          const Formula& phi);

/// Validates parameter sorts and body well-formedness of every definition.
void check_interpretation(const Interpretation& beta, const Signature& src, const Signature& dst);

struct WitnessCheck {
    std::string name;
    bool pass;
    std::string counterexample;  // a point, empty when passing
};

struct WitnessReport {
    std::vector<WitnessCheck> checks;
    std::vector<std::string> warnings;

    bool all_pass() const;
    /// `CHECK <name> PASS|FAIL [counterexample]`, one line per check.
    std::string machine_str() const;
    std::string human_str() const;
};

/// Verifies an equivalence witness against both translation diagrams and the
/// round-trip identities, on the given probe batteries (descriptions over
/// the left and right signatures respectively). Structural witness defects
/// (alpha not a bijection, delta not an isomorphism) throw ContractError
/// before any probe runs. Without translation components only the
/// conjugacy checks run.
WitnessReport verify_witness(const MultiModel& kb1, const MultiModel& kb2,
                             const EquivalenceWitness& w,
                             const std::vector<Description>& probes_left,
                             const std::vector<Description>& probes_right,
                             const EngineConfig& cfg = engine_config());

/// All single-atom descriptions over contexts of at most `max_vars`
/// variables: one variable per sort combination, relation atoms in every
/// sort-correct variable arrangement plus variable equalities.
std::vector<Description> default_probe_battery(const Signature& sig, std::size_t max_vars = 2);

/// Bounded search for a defining formula of every relation of `src` over
/// `dst` such that the translation diagram commutes on `pair`: quantifier-
/// free combinations of depth at most `depth` are enumerated semantically.
/// Returns absent when some relation has no definition within the bound.
std::optional<Interpretation> synthesize_interpretation(const Model& src_model,
                                                        const Model& dst_model,
                                                        const SortedMap& delta,
                                                        std::size_t depth = 3,
                                                        const EngineConfig& cfg = engine_config());

}  // namespace kb

#endif
