#ifndef KB_KERNELS_HPP
#define KB_KERNELS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "kb/algebra.hpp"

namespace kb::kernels {

/// Number of worker threads for the parallel backend; 1 selects the serial
/// reference path in the dispatching wrappers.
int max_threads();
void set_max_threads(int n);

/// Upper bound on context arity accepted by the kernels.
inline constexpr std::size_t kMaxArity = 64;

// Every kernel exists twice: a serial reference implementation and an
// OpenMP-parallel one over 64-point word blocks. Both produce identical
// words; the wrappers at the bottom dispatch on max_threads().

namespace serial {

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out);

void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out);

void exists_var(const PointSpace& space, std::size_t var_pos,
                std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

/// Membership of the pulled-back point: out[nu] = in[s~(nu)].
void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

/// Forward image of the pull-back map: out[s~(nu)] |= in[nu].
void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

/// Diagonal group action: reps[p] = min over members of the image index.
void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps);

/// Sorted, deduplicated block labels along the var_pos line through every
/// point, padded with 0xFFFFFFFF to `radius` slots per point.
void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots);

/// Value of one term at every point. Carriers must fit in a byte.
void term_values(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& prog,
                 std::span<std::uint8_t> out);

}  // namespace serial

namespace omp {

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out);

void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out);

void exists_var(const PointSpace& space, std::size_t var_pos,
                std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out);

void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps);

void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots);

void term_values(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& prog,
                 std::span<std::uint8_t> out);

}  // namespace omp

// Dispatching wrappers.

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out);
void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out);
void exists_var(const PointSpace& space, std::size_t var_pos, std::span<const std::uint64_t> in,
                std::span<std::uint64_t> out);
void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out);
void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out);
void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out);
void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out);
void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps);
void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots);
void term_values(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& prog,
                 std::span<std::uint8_t> out);

}  // namespace kb::kernels

#endif
