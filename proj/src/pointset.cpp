#include "kb/pointset.hpp"

#include <bit>

namespace kb {

PointSet::PointSet(std::shared_ptr<const FiniteAlgebra> algebra, Context ctx, bool full,
                   std::uint64_t max_points)
    : algebra_(std::move(algebra)), ctx_(std::move(ctx)) {
    PointSpace space(*algebra_, ctx_, max_points);
    npoints_ = space.size();
    words_.assign(word_count(npoints_), 0);
    if (full) {
        for (auto& w : words_) w = ~std::uint64_t(0);
        if (npoints_ & 63) words_.back() = (std::uint64_t(1) << (npoints_ & 63)) - 1;
    }
}

bool PointSet::contains(const Assignment& a) const {
    PointSpace space(*algebra_, ctx_);
    return test(space.index_of(a));
}

std::uint64_t PointSet::count() const {
    std::uint64_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

bool PointSet::none() const {
    for (auto w : words_)
        if (w) return false;
    return true;
}

void PointSet::require_compatible(const PointSet& other) const {
    if (!(ctx_ == other.ctx_))
        throw ContractError("point sets over different contexts");
    if (algebra_ != other.algebra_ && !(*algebra_ == *other.algebra_))
        throw ContractError("point sets over different algebras");
}

PointSet& PointSet::operator&=(const PointSet& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
}

PointSet& PointSet::operator|=(const PointSet& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

PointSet& PointSet::operator-=(const PointSet& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
}

PointSet PointSet::complemented() const {
    PointSet out = *this;
    for (auto& w : out.words_) w = ~w;
    if (npoints_ & 63) out.words_.back() &= (std::uint64_t(1) << (npoints_ & 63)) - 1;
    return out;
}

bool PointSet::operator==(const PointSet& other) const {
    require_compatible(other);
    return words_ == other.words_;
}

bool PointSet::is_subset_of(const PointSet& other) const {
    require_compatible(other);
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~other.words_[i]) return false;
    return true;
}

std::uint64_t PointSet::first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i]) return (std::uint64_t(i) << 6) + std::countr_zero(words_[i]);
    return npoints_;
}

void PointSet::for_each(const std::function<void(std::uint64_t)>& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            fn((std::uint64_t(i) << 6) + std::countr_zero(w));
            w &= w - 1;
        }
    }
}

std::string PointSet::format_point(std::uint64_t index) const {
    if (ctx_.vars.empty()) return "()";
    PointSpace space(*algebra_, ctx_);
    Assignment a = space.decode(index);
    std::string out;
    for (std::size_t i = 0; i < ctx_.vars.size(); ++i) {
        if (i) out += ' ';
        out += ctx_.vars[i].name;
        out += '=';
        out += algebra_->element_name(ctx_.vars[i].sort, a.values[i]);
    }
    return out;
}

std::string PointSet::str() const {
    std::string out;
    for_each([&](std::uint64_t idx) {
        out += format_point(idx);
        out += '\n';
    });
    return out;
}

}  // namespace kb
