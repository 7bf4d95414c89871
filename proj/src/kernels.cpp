#include "kb/kernels.hpp"

#include <algorithm>
#include <atomic>

#ifdef KB_HAVE_OPENMP
#include <omp.h>
#endif

namespace kb::kernels {

namespace {

int g_max_threads = 1;

/// Mixed-radix counter over a point space; cheaper than per-point decode.
struct PointCursor {
    const PointSpace* space;
    std::uint32_t vals[kMaxArity];

    explicit PointCursor(const PointSpace& s) : space(&s) {
        if (s.arity() > kMaxArity)
            throw LimitError("context arity exceeds the kernel bound of 64 variables");
        std::fill(vals, vals + s.arity(), 0);
    }
    void seek(std::uint64_t index) {
        space->decode_into(index, std::span<std::uint32_t>(vals, space->arity()));
    }
    void advance() {
        for (std::size_t k = space->arity(); k-- > 0;) {
            if (++vals[k] < space->radius(k)) return;
            vals[k] = 0;
        }
    }
    std::span<const std::uint32_t> values() const {
        return std::span<const std::uint32_t>(vals, space->arity());
    }
};

inline std::uint64_t map_index(const PointSpace& dst,
                               std::span<const std::span<const std::uint32_t>> var_maps,
                               std::span<const std::uint32_t> point) {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < point.size(); ++k) idx += std::uint64_t(var_maps[k][point[k]]) * dst.strides()[k];
    return idx;
}

inline std::uint64_t image_index(const FiniteAlgebra& g, const PointSpace& domain_space,
                                 std::span<const TermProgram> images,
                                 std::span<const std::uint32_t> nu) {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < images.size(); ++k)
        idx += std::uint64_t(images[k].eval(g, nu)) * domain_space.strides()[k];
    return idx;
}

inline bool test_bit(std::span<const std::uint64_t> words, std::uint64_t i) {
    return (words[i >> 6] >> (i & 63)) & 1;
}

inline void sort_dedup_pad(std::uint32_t* slot, std::size_t filled, std::size_t width) {
    std::sort(slot, slot + filled);
    std::size_t n = std::unique(slot, slot + filled) - slot;
    for (std::size_t i = n; i < width; ++i) slot[i] = 0xFFFFFFFFu;
}

}  // namespace

int max_threads() { return g_max_threads; }

void set_max_threads(int n) { g_max_threads = n < 1 ? 1 : n; }

// ---------------------------------------------------------------------------
// Serial reference implementations: one plain pass over the point space.
// ---------------------------------------------------------------------------

namespace serial {

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    PointCursor c(space);
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance()) {
        if (lhs.eval(g, c.values()) == rhs.eval(g, c.values()))
            out[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
}

void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    const FiniteAlgebra& g = *m.algebra;
    PointCursor c(space);
    std::uint32_t tuple[kMaxArity];
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance()) {
        for (std::size_t k = 0; k < args.size(); ++k) tuple[k] = args[k].eval(g, c.values());
        if (m.rel_contains(rel, std::span<const std::uint32_t>(tuple, args.size())))
            out[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
}

void exists_var(const PointSpace& space, std::size_t var_pos, std::span<const std::uint64_t> in,
                std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    const std::uint64_t stride = space.strides()[var_pos];
    const std::uint32_t radius = space.radius(var_pos);
    PointCursor c(space);
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance()) {
        std::uint64_t base = i - std::uint64_t(c.vals[var_pos]) * stride;
        bool hit = false;
        for (std::uint32_t k = 0; k < radius && !hit; ++k) hit = test_bit(in, base + k * stride);
        if (hit) out[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
}

void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    PointCursor c(codomain_space);
    for (std::uint64_t i = 0; i < codomain_space.size(); ++i, c.advance()) {
        if (test_bit(in, image_index(g, domain_space, images, c.values())))
            out[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
}

void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    PointCursor c(codomain_space);
    for (std::uint64_t i = 0; i < codomain_space.size(); ++i, c.advance()) {
        if (!test_bit(in, i)) continue;
        std::uint64_t target = image_index(g, domain_space, images, c.values());
        out[target >> 6] |= std::uint64_t(1) << (target & 63);
    }
}

void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    PointCursor c(src_space);
    for (std::uint64_t i = 0; i < src_space.size(); ++i, c.advance()) {
        if (test_bit(in, map_index(dst_space, var_maps, c.values())))
            out[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
}

void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    PointCursor c(src_space);
    for (std::uint64_t i = 0; i < src_space.size(); ++i, c.advance()) {
        if (!test_bit(in, i)) continue;
        std::uint64_t target = map_index(dst_space, var_maps, c.values());
        out[target >> 6] |= std::uint64_t(1) << (target & 63);
    }
}

void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps) {
    PointCursor c(space);
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance()) {
        std::uint64_t rep = i;
        for (const auto& maps : member_var_maps)
            rep = std::min(rep, map_index(space, maps, c.values()));
        reps[i] = rep;
    }
}

void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots) {
    const std::uint64_t stride = space.strides()[var_pos];
    const std::uint32_t radius = space.radius(var_pos);
    PointCursor c(space);
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance()) {
        std::uint64_t base = i - std::uint64_t(c.vals[var_pos]) * stride;
        std::uint32_t* slot = slots.data() + i * radius;
        for (std::uint32_t k = 0; k < radius; ++k) slot[k] = labels[base + k * stride];
        sort_dedup_pad(slot, radius, radius);
    }
}

void term_values(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& prog,
                 std::span<std::uint8_t> out) {
    PointCursor c(space);
    for (std::uint64_t i = 0; i < space.size(); ++i, c.advance())
        out[i] = static_cast<std::uint8_t>(prog.eval(g, c.values()));
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP implementations: parallel over 64-point word blocks so each thread
// owns whole output words; scatter kernels use atomic word ORs. Results are
// bit-identical to the serial path for any thread count.
// ---------------------------------------------------------------------------

namespace omp {

namespace {

template <class PerBlock>
void parallel_blocks(std::uint64_t nblocks, PerBlock&& per_block) {
#ifdef KB_HAVE_OPENMP
    const std::int64_t n = static_cast<std::int64_t>(nblocks);
#pragma omp parallel for schedule(static) num_threads(g_max_threads)
    for (std::int64_t b = 0; b < n; ++b) per_block(static_cast<std::uint64_t>(b));
#else
    for (std::uint64_t b = 0; b < nblocks; ++b) per_block(b);
#endif
}

inline void atomic_or(std::uint64_t* word, std::uint64_t bits) {
    __atomic_fetch_or(word, bits, __ATOMIC_RELAXED);
}

}  // namespace

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out) {
    const std::uint64_t n = space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        std::uint64_t word = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            if (lhs.eval(g, c.values()) == rhs.eval(g, c.values())) word |= std::uint64_t(1) << k;
        }
        out[b] = word;
    });
}

void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out) {
    const FiniteAlgebra& g = *m.algebra;
    const std::uint64_t n = space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        std::uint32_t tuple[kMaxArity];
        std::uint64_t word = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            for (std::size_t a = 0; a < args.size(); ++a) tuple[a] = args[a].eval(g, c.values());
            if (m.rel_contains(rel, std::span<const std::uint32_t>(tuple, args.size())))
                word |= std::uint64_t(1) << k;
        }
        out[b] = word;
    });
}

void exists_var(const PointSpace& space, std::size_t var_pos, std::span<const std::uint64_t> in,
                std::span<std::uint64_t> out) {
    const std::uint64_t n = space.size();
    const std::uint64_t stride = space.strides()[var_pos];
    const std::uint32_t radius = space.radius(var_pos);
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        std::uint64_t word = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            std::uint64_t i = (b << 6) + k;
            std::uint64_t base = i - std::uint64_t(c.vals[var_pos]) * stride;
            for (std::uint32_t v = 0; v < radius; ++v) {
                if (test_bit(in, base + v * stride)) {
                    word |= std::uint64_t(1) << k;
                    break;
                }
            }
        }
        out[b] = word;
    });
}

void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    const std::uint64_t n = codomain_space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(codomain_space);
        c.seek(b << 6);
        std::uint64_t word = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            if (test_bit(in, image_index(g, domain_space, images, c.values())))
                word |= std::uint64_t(1) << k;
        }
        out[b] = word;
    });
}

void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    const std::uint64_t n = codomain_space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        std::uint64_t w = in[b];
        if (!w) return;
        PointCursor c(codomain_space);
        std::uint64_t prev = ~std::uint64_t(0);
        while (w) {
            std::uint64_t k = std::countr_zero(w);
            w &= w - 1;
            std::uint64_t i = (b << 6) + k;
            if (prev == ~std::uint64_t(0)) c.seek(i);
            else for (std::uint64_t step = prev; step < i; ++step) c.advance();
            prev = i;
            std::uint64_t target = image_index(g, domain_space, images, c.values());
            atomic_or(&out[target >> 6], std::uint64_t(1) << (target & 63));
        }
    });
}

void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    const std::uint64_t n = src_space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(src_space);
        c.seek(b << 6);
        std::uint64_t word = 0;
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            if (test_bit(in, map_index(dst_space, var_maps, c.values())))
                word |= std::uint64_t(1) << k;
        }
        out[b] = word;
    });
}

void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    std::fill(out.begin(), out.end(), 0);
    const std::uint64_t n = src_space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        std::uint64_t w = in[b];
        if (!w) return;
        PointCursor c(src_space);
        while (w) {
            std::uint64_t k = std::countr_zero(w);
            w &= w - 1;
            c.seek((b << 6) + k);
            std::uint64_t target = map_index(dst_space, var_maps, c.values());
            atomic_or(&out[target >> 6], std::uint64_t(1) << (target & 63));
        }
    });
}

void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps) {
    const std::uint64_t n = space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            std::uint64_t i = (b << 6) + k;
            std::uint64_t rep = i;
            for (const auto& maps : member_var_maps)
                rep = std::min(rep, map_index(space, maps, c.values()));
            reps[i] = rep;
        }
    });
}

void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots) {
    const std::uint64_t n = space.size();
    const std::uint64_t stride = space.strides()[var_pos];
    const std::uint32_t radius = space.radius(var_pos);
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance()) {
            std::uint64_t i = (b << 6) + k;
            std::uint64_t base = i - std::uint64_t(c.vals[var_pos]) * stride;
            std::uint32_t* slot = slots.data() + i * radius;
            for (std::uint32_t v = 0; v < radius; ++v) slot[v] = labels[base + v * stride];
            sort_dedup_pad(slot, radius, radius);
        }
    });
}

void term_values(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& prog,
                 std::span<std::uint8_t> out) {
    const std::uint64_t n = space.size();
    parallel_blocks((n + 63) >> 6, [&](std::uint64_t b) {
        PointCursor c(space);
        c.seek(b << 6);
        const std::uint64_t hi = std::min<std::uint64_t>(n - (b << 6), 64);
        for (std::uint64_t k = 0; k < hi; ++k, c.advance())
            out[(b << 6) + k] = static_cast<std::uint8_t>(prog.eval(g, c.values()));
    });
}

}  // namespace omp

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

void fill_equality(const FiniteAlgebra& g, const PointSpace& space, const TermProgram& lhs,
                   const TermProgram& rhs, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::fill_equality(g, space, lhs, rhs, out);
    else serial::fill_equality(g, space, lhs, rhs, out);
}

void fill_relation(const Model& m, const PointSpace& space, RelId rel,
                   std::span<const TermProgram> args, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::fill_relation(m, space, rel, args, out);
    else serial::fill_relation(m, space, rel, args, out);
}

void exists_var(const PointSpace& space, std::size_t var_pos, std::span<const std::uint64_t> in,
                std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::exists_var(space, var_pos, in, out);
    else serial::exists_var(space, var_pos, in, out);
}

void subst_preimage(const FiniteAlgebra& g, const PointSpace& domain_space,
                    const PointSpace& codomain_space, std::span<const TermProgram> images,
                    std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::subst_preimage(g, domain_space, codomain_space, images, in, out);
    else serial::subst_preimage(g, domain_space, codomain_space, images, in, out);
}

void subst_image(const FiniteAlgebra& g, const PointSpace& domain_space,
                 const PointSpace& codomain_space, std::span<const TermProgram> images,
                 std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::subst_image(g, domain_space, codomain_space, images, in, out);
    else serial::subst_image(g, domain_space, codomain_space, images, in, out);
}

void hom_preimage(const PointSpace& src_space, const PointSpace& dst_space,
                  std::span<const std::span<const std::uint32_t>> var_maps,
                  std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::hom_preimage(src_space, dst_space, var_maps, in, out);
    else serial::hom_preimage(src_space, dst_space, var_maps, in, out);
}

void hom_image(const PointSpace& src_space, const PointSpace& dst_space,
               std::span<const std::span<const std::uint32_t>> var_maps,
               std::span<const std::uint64_t> in, std::span<std::uint64_t> out) {
    if (g_max_threads > 1) omp::hom_image(src_space, dst_space, var_maps, in, out);
    else serial::hom_image(src_space, dst_space, var_maps, in, out);
}

void orbit_reps(const PointSpace& space,
                std::span<const std::vector<std::span<const std::uint32_t>>> member_var_maps,
                std::span<std::uint64_t> reps) {
    if (g_max_threads > 1) omp::orbit_reps(space, member_var_maps, reps);
    else serial::orbit_reps(space, member_var_maps, reps);
}

void line_signatures(const PointSpace& space, std::size_t var_pos,
                     std::span<const std::uint32_t> labels, std::span<std::uint32_t> slots) {
    if (g_max_threads > 1) omp::line_signatures(space, var_pos, labels, slots);
    else serial::line_signatures(space, var_pos, labels, slots);
}

}  // namespace kb::kernels
