#ifndef KB_GALOIS_HPP
#define KB_GALOIS_HPP

#include <vector>

#include "kb/semantics.hpp"

namespace kb {

/// A knowledge description (X, T): a finite list of formulas at one place.
struct Description {
    Context context;
    std::vector<Formula> formulas;

    bool operator==(const Description&) const = default;
};

/// Content of a description: the intersection of the values of its formulas;
/// the full space for an empty description.
PointSet content(const Model& m, const Description& d, const EngineConfig& cfg = engine_config());

/// Consequence within the model: true iff every point of content(m, d)
/// satisfies v, i.e. v belongs to the closure of the description.
bool entails(const Model& m, const Description& d, const Formula& v,
             const EngineConfig& cfg = engine_config());

/// Membership of a formula in the logical kernel of the point mu.
bool log_kernel_contains(const Model& m, const Context& ctx, const Assignment& mu,
                         const Formula& u, const EngineConfig& cfg = engine_config());

enum class AlgebraicTest {
    /// Member of the generated definable algebra at the default budget.
    generated,
    /// Union of orbits of the model's automorphism group.
    invariant,
};

/// Whether A is an algebraic set (the content of some description) for `m`.
/// For finite models the two methods agree.
bool is_algebraic_set(const Model& m, const PointSet& A, AlgebraicTest method,
                      const EngineConfig& cfg = engine_config());

/// The Boolean algebra of definable sets restricted to an algebraic set A:
/// elements are intersections of definable sets with A, the unit is A, the
/// atoms are the nonempty restrictions of the definable atoms.
struct CoordinateAlgebra {
    PointSet domain;              // A, the unit
    std::vector<PointSet> atoms;  // nonempty restrictions, canonical order

    std::uint64_t atom_count() const { return atoms.size(); }
    /// 2^atoms; throws LimitError past the element cap.
    std::uint64_t element_count(const EngineConfig& cfg = engine_config()) const;
    std::vector<PointSet> elements(const EngineConfig& cfg = engine_config()) const;
    /// The element a formula denotes: its value intersected with A.
    PointSet element_of(const Model& m, const Formula& u,
                        const EngineConfig& cfg = engine_config()) const;
    bool contains(const PointSet& candidate) const;
};

CoordinateAlgebra coordinate_algebra(const Model& m, const Description& d,
                                     const EngineConfig& cfg = engine_config());

/// Admissibility of a substitution s: W(Y) -> W(X) for contents A over X and
/// B over Y: the pulled-back point of every member of A lies in B.
bool check_admissible(const Substitution& s, const PointSet& A, const PointSet& B);

/// Admissibility of the pair (s, delta): delta applied after the pull-back
/// carries A over (X, G1) into B over (Y, G2).
bool check_admissible_pair(const Substitution& s, const SortedMap& delta, const PointSet& A,
                           const PointSet& B);

}  // namespace kb

#endif
