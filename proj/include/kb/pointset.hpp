#ifndef KB_POINTSET_HPP
#define KB_POINTSET_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kb/algebra.hpp"

namespace kb {

/// A subset of the point space G^X, stored as a dense bit vector indexed in
/// enumerate_points order. Immutable value semantics; binary operations
/// require matching context and algebra.
class PointSet {
  public:
    PointSet() = default;
    PointSet(std::shared_ptr<const FiniteAlgebra> algebra, Context ctx, bool full = false,
             std::uint64_t max_points = engine_config().max_points);

    static PointSet empty_set(std::shared_ptr<const FiniteAlgebra> algebra, Context ctx) {
        return PointSet(std::move(algebra), std::move(ctx), false);
    }
    static PointSet full_set(std::shared_ptr<const FiniteAlgebra> algebra, Context ctx) {
        return PointSet(std::move(algebra), std::move(ctx), true);
    }

    const Context& context() const { return ctx_; }
    const FiniteAlgebra& algebra() const { return *algebra_; }
    const std::shared_ptr<const FiniteAlgebra>& algebra_ptr() const { return algebra_; }
    std::uint64_t point_count() const { return npoints_; }

    bool test(std::uint64_t index) const {
        return (words_[index >> 6] >> (index & 63)) & 1;
    }
    void set(std::uint64_t index) { words_[index >> 6] |= std::uint64_t(1) << (index & 63); }
    void reset(std::uint64_t index) { words_[index >> 6] &= ~(std::uint64_t(1) << (index & 63)); }
    bool contains(const Assignment& a) const;

    std::uint64_t count() const;
    bool none() const;
    bool all() const { return count() == npoints_; }

    PointSet& operator&=(const PointSet& other);
    PointSet& operator|=(const PointSet& other);
    /// Set difference.
    PointSet& operator-=(const PointSet& other);
    PointSet complemented() const;

    friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
    friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }
    friend PointSet operator-(PointSet a, const PointSet& b) { return a -= b; }

    bool operator==(const PointSet& other) const;
    bool operator!=(const PointSet& other) const { return !(*this == other); }
    bool is_subset_of(const PointSet& other) const;

    /// Strict total order on same-space sets (word-lexicographic); used only
    /// for canonical dedup, not a semantic relation.
    bool bits_less(const PointSet& other) const { return words_ < other.words_; }

    std::span<std::uint64_t> words() { return words_; }
    std::span<const std::uint64_t> words() const { return words_; }

    /// First member index, or npoints when empty.
    std::uint64_t first() const;
    void for_each(const std::function<void(std::uint64_t)>& fn) const;

    /// One assignment per line, `x=e1 y=e2`, in point-index order. A point of
    /// the empty context prints as `()`.
    std::string str() const;
    std::string format_point(std::uint64_t index) const;

  private:
    void require_compatible(const PointSet& other) const;

    std::shared_ptr<const FiniteAlgebra> algebra_;
    Context ctx_;
    std::uint64_t npoints_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Number of 64-bit words covering `npoints` bits.
inline std::uint64_t word_count(std::uint64_t npoints) { return (npoints + 63) >> 6; }

}  // namespace kb

#endif
