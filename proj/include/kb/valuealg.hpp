#ifndef KB_VALUEALG_HPP
#define KB_VALUEALG_HPP

#include <vector>

#include "kb/pointset.hpp"

namespace kb {

/// Disjoint nonempty point sets covering a space. Canonical order: blocks
/// sorted by their minimal point index; points inside a block in index order.
struct Partition {
    std::vector<PointSet> blocks;

    std::size_t size() const { return blocks.size(); }
    bool operator==(const Partition& other) const;
    /// One block per line as `{p1, p2, ...}` with points in assignment form.
    std::string str() const;
};

/// Builds the canonical partition from a per-point block label array.
Partition partition_from_labels(std::shared_ptr<const FiniteAlgebra> algebra, const Context& ctx,
                                std::span<const std::uint32_t> labels);

/// The finite Boolean algebra of all point sets definable in a model at one
/// place, represented by its atom partition. Elements are exactly the unions
/// of atoms; they are materialized only on demand.
struct DefinableAlgebra {
    Context context;
    std::shared_ptr<const FiniteAlgebra> algebra;
    Partition atom_partition;

    std::size_t atom_count() const { return atom_partition.size(); }
    /// Membership test: is `candidate` a union of atoms?
    bool contains(const PointSet& candidate) const;
    /// All 2^atoms elements; throws LimitError past the element cap.
    std::vector<PointSet> elements(const EngineConfig& cfg = engine_config()) const;
};

/// Generates the value algebra of `m` at X with `aux` auxiliary variables of
/// each sort: seeds with atomic-formula values over the extended place,
/// closes under complement, intersection and all quantifiers, then maps down
/// to X along a retraction and closes again. The unset default budget is the
/// sum of the carrier sizes.
DefinableAlgebra generate_definable_algebra(const Model& m, const Context& X, std::uint32_t aux,
                                            const EngineConfig& cfg = engine_config());
std::uint32_t default_aux_budget(const FiniteAlgebra& g);

/// The minimal nonzero elements.
Partition atoms(const DefinableAlgebra& d);

/// Orbits of a permutation group acting diagonally on G^X. The input is
/// verified to be a group (closed under composition and inverse, contains
/// the identity); a violation is reported with a witness pair.
Partition orbit_partition(const std::vector<SortedMap>& group,
                          std::shared_ptr<const FiniteAlgebra> g, const Context& X,
                          const EngineConfig& cfg = engine_config());

}  // namespace kb

#endif
