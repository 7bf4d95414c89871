#ifndef KB_SEMANTICS_HPP
#define KB_SEMANTICS_HPP

#include <string_view>

#include "kb/pointset.hpp"

namespace kb {

enum class TransportMode { preimage, image };

/// Solution set of `phi` in `m` over the place X: all points of G^X
/// satisfying the formula. Free variables must lie in X; bound variables
/// outside X are evaluated over an internal extension and projected away.
PointSet val(const Model& m, const Context& X, const Formula& phi,
             const EngineConfig& cfg = engine_config());

/// Cylindrification of A along a context variable.
PointSet exists_quant(const PointSet& A, std::string_view var);

/// preimage: A over the domain context X, result over the codomain Y
///   (membership of the pulled-back point; a Boolean homomorphism).
/// image: A over the codomain Y, result over X (the forward image of the
///   pull-back map; preserves unions and the empty set only).
PointSet transport_subst(const Substitution& s, const PointSet& A, TransportMode mode);

/// preimage: A over delta's destination algebra, result over its source.
/// image: A over the source algebra, result over the destination.
/// The map is checked to be a homomorphism.
PointSet transport_hom(const SortedMap& delta, const PointSet& A, TransportMode mode);

/// True iff u and v take the same value in every instance of M at place X.
bool semantically_equivalent(const Formula& u, const Formula& v, const MultiModel& M,
                             const Context& X, const EngineConfig& cfg = engine_config());

/// Low-level: value of a single atomic formula (equality or relation) over
/// an explicit space, written into `out`.
void eval_atomic(const Model& m, const Context& ctx, const PointSpace& space, const Formula& atom,
                 std::span<std::uint64_t> out);

}  // namespace kb

#endif
