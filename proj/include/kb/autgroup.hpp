#ifndef KB_AUTGROUP_HPP
#define KB_AUTGROUP_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kb/algebra.hpp"

namespace kb {

/// A finite group of sorted bijections of one algebra, canonically ordered.
struct PermutationGroup {
    std::shared_ptr<const FiniteAlgebra> algebra;
    std::vector<SortedMap> members;  // sorted; contains the identity

    std::size_t order() const { return members.size(); }
    bool contains(const SortedMap& g) const;
    /// Closure under composition and inverse plus identity membership;
    /// throws ContractError with a witness pair on violation.
    void verify_group() const;

    bool operator==(const PermutationGroup& other) const { return members == other.members; }
};

/// All sorted bijections of the model's algebra that preserve every
/// operation table and every relation, by backtracking over partial
/// sort-wise maps with table- and relation-consistency pruning.
PermutationGroup automorphism_group(const Model& m);

/// Every algebra isomorphism G1 -> G2 in canonical enumeration order, passed
/// to `yield`; enumeration stops early when `yield` returns false.
void for_each_algebra_isomorphism(const std::shared_ptr<const FiniteAlgebra>& g1,
                                  const std::shared_ptr<const FiniteAlgebra>& g2,
                                  const std::function<bool(const SortedMap&)>& yield);
std::vector<SortedMap> algebra_isomorphisms(const std::shared_ptr<const FiniteAlgebra>& g1,
                                            const std::shared_ptr<const FiniteAlgebra>& g2);

/// First isomorphism delta (canonical order) with
/// Aut(m2) = delta Aut(m1) delta^-1, or absent when none exists.
std::optional<SortedMap> automorphic_equivalent(const Model& m1, const Model& m2);

/// A certificate of multi-model equivalence: an instance bijection with one
/// conjugating isomorphism per matched pair, optionally extended with the
/// relation-translation homomorphisms of each direction.
struct EquivalenceWitness {
    std::vector<std::pair<std::string, std::string>> alpha;  // (f in F1, f^alpha in F2)
    std::vector<SortedMap> deltas;                           // parallel to alpha
    std::vector<std::optional<Interpretation>> betas;        // source rels over target sig
    std::vector<std::optional<Interpretation>> beta_primes;  // target rels over source sig
};

struct EquivalenceVerdict {
    std::optional<EquivalenceWitness> witness;
    std::string reason;  // set when inequivalent

    bool equivalent() const { return witness.has_value(); }
};

/// Decides automorphic equivalence of two multi-models: builds the bipartite
/// compatibility graph over instances and searches a perfect matching by
/// augmenting paths. With `uniform_delta` a single isomorphism must work for
/// every matched pair (stricter than per-pair witnesses).
EquivalenceVerdict multimodel_equivalent(const MultiModel& m1, const MultiModel& m2,
                                         bool uniform_delta = false);

}  // namespace kb

#endif
