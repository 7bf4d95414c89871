#ifndef KB_ALGEBRA_HPP
#define KB_ALGEBRA_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kb/config.hpp"
#include "kb/syntax.hpp"

namespace kb {

/// A finite multi-sorted algebra: per-sort carriers plus one total table per
/// operation symbol. Immutable after construction.
struct FiniteAlgebra {
    Signature sig;
    /// Element names per sort, in declaration order; indices are identities.
    std::vector<std::vector<std::string>> carriers;
    /// Per op: flat table over argument tuples, first argument most
    /// significant, values are result-carrier element indices.
    std::vector<std::vector<std::uint32_t>> tables;

    std::size_t carrier_size(SortId s) const { return carriers.at(s).size(); }
    const std::string& element_name(SortId s, std::uint32_t e) const {
        return carriers.at(s).at(e);
    }
    std::optional<std::uint32_t> find_element(SortId s, std::string_view name) const;

    std::uint64_t table_index(OpId op, std::span<const std::uint32_t> args) const;
    std::uint32_t apply(OpId op, std::span<const std::uint32_t> args) const;

    /// Structural checks plus exhaustive verification of declared identities.
    void validate() const;

    bool operator==(const FiniteAlgebra&) const = default;
};

/// One relation's interpretation: dense membership over its tuple space.
struct Relation {
    std::vector<std::uint8_t> membership;  // one byte per encoded tuple

    bool contains(std::uint64_t tuple_index) const { return membership[tuple_index] != 0; }
};

/// A model: an algebra together with an interpretation of every relation
/// symbol of its signature.
struct Model {
    std::shared_ptr<const FiniteAlgebra> algebra;
    std::vector<Relation> rels;  // indexed by RelId

    std::uint64_t rel_tuple_index(RelId r, std::span<const std::uint32_t> tuple) const;
    bool rel_contains(RelId r, std::span<const std::uint32_t> tuple) const {
        return rels.at(r).contains(rel_tuple_index(r, tuple));
    }
};

/// One algebra, one relation vocabulary, many named instances.
struct MultiModel {
    std::shared_ptr<const FiniteAlgebra> algebra;
    std::vector<std::string> instance_names;
    std::vector<Model> instances;

    std::optional<std::size_t> find_instance(std::string_view name) const;
    const Model& instance(std::string_view name) const;
};

/// A point of G^X: one carrier element index per context variable.
struct Assignment {
    std::vector<std::uint32_t> values;
    bool operator==(const Assignment&) const = default;
};

/// Mixed-radix arithmetic over G^X: bijection between assignments and the
/// stable lexicographic point index (first variable most significant).
class PointSpace {
  public:
    PointSpace(const FiniteAlgebra& algebra, const Context& ctx,
               std::uint64_t max_points = engine_config().max_points);

    std::uint64_t size() const { return size_; }
    std::size_t arity() const { return radii_.size(); }
    std::uint32_t radius(std::size_t var_pos) const { return radii_[var_pos]; }
    const std::vector<std::uint64_t>& strides() const { return strides_; }

    std::uint64_t index_of(const Assignment& a) const;
    Assignment decode(std::uint64_t index) const;
    void decode_into(std::uint64_t index, std::span<std::uint32_t> out) const;
    /// Index of `base` with the coordinate at `var_pos` replaced by `value`.
    std::uint64_t with_coordinate(std::uint64_t base, std::size_t var_pos,
                                  std::uint32_t value) const;
    std::uint32_t coordinate(std::uint64_t index, std::size_t var_pos) const;

  private:
    std::vector<std::uint32_t> radii_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t size_ = 1;
};

/// Lexicographic enumeration of all points of G^X; the position of an
/// assignment in this list is its PointSet bit index.
std::vector<Assignment> enumerate_points(const FiniteAlgebra& algebra, const Context& ctx,
                                         std::uint64_t max_points = engine_config().max_points);

/// Value of the homomorphic extension of `mu` at `t`.
std::uint32_t eval_term(const FiniteAlgebra& algebra, const Context& ctx, const Assignment& mu,
                        const Term& t);

/// A term flattened to a postorder program with variable positions resolved
/// against a fixed context; the fast path for per-point kernels.
struct TermProgram {
    struct Instr {
        std::int32_t var_pos;  // >= 0: push point coordinate; < 0: apply op
        OpId op;
        std::uint32_t argc;
    };
    std::vector<Instr> instrs;
    SortId result_sort = 0;

    std::uint32_t eval(const FiniteAlgebra& algebra, std::span<const std::uint32_t> point) const;
};

TermProgram compile_term(const FiniteAlgebra& algebra, const Context& ctx, const Term& t);

/// The map s~: a point over the codomain context pulled back to the domain
/// context, coordinate k evaluated as s(x_k) under `nu`.
Assignment pull_point(const FiniteAlgebra& algebra, const Substitution& s, const Assignment& nu);

/// A sort-indexed map between the carriers of two algebras over the same
/// signature skeleton (operations matched by position).
struct SortedMap {
    std::shared_ptr<const FiniteAlgebra> src;
    std::shared_ptr<const FiniteAlgebra> dst;
    std::vector<std::vector<std::uint32_t>> images;  // per sort, per element

    std::uint32_t map(SortId s, std::uint32_t e) const { return images[s][e]; }
    bool is_bijective() const;
    bool is_identity() const;
    SortedMap inverse() const;  // requires bijectivity

    static SortedMap identity_map(std::shared_ptr<const FiniteAlgebra> g);

    /// Per-sort image tuples compared lexicographically; the canonical order
    /// of group members and isomorphism streams.
    friend bool operator<(const SortedMap& a, const SortedMap& b) { return a.images < b.images; }
    friend bool operator==(const SortedMap& a, const SortedMap& b) { return a.images == b.images; }
};

/// Throws ContractError naming the violated table row unless `m` commutes
/// with every operation.
void check_homomorphism(const SortedMap& m);
bool is_homomorphism(const SortedMap& m);

/// Advances a mixed-radix tuple in place; returns false after wrapping back
/// to all zeros (i.e. when iteration is complete).
inline bool next_tuple(std::span<std::uint32_t> tuple, std::span<const std::uint32_t> radii) {
    for (std::size_t k = tuple.size(); k-- > 0;) {
        if (++tuple[k] < radii[k]) return true;
        tuple[k] = 0;
    }
    return false;
}

/// Composition (second ∘ first); src of `second` must be dst of `first`.
SortedMap compose(const SortedMap& second, const SortedMap& first);

}  // namespace kb

#endif
