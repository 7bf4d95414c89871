#include "kb/algebra.hpp"

#include <algorithm>

namespace kb {

EngineConfig& engine_config() {
    static EngineConfig cfg;
    return cfg;
}

std::optional<std::uint32_t> FiniteAlgebra::find_element(SortId s, std::string_view name) const {
    const auto& c = carriers.at(s);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

std::uint64_t FiniteAlgebra::table_index(OpId op, std::span<const std::uint32_t> args) const {
    const OpSymbol& sym = sig.ops.at(op);
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < sym.arg_sorts.size(); ++i)
        idx = idx * carrier_size(sym.arg_sorts[i]) + args[i];
    return idx;
}

std::uint32_t FiniteAlgebra::apply(OpId op, std::span<const std::uint32_t> args) const {
    return tables.at(op)[table_index(op, args)];
}

void FiniteAlgebra::validate() const {
    sig.validate();
    if (carriers.size() != sig.sorts.size())
        throw ContractError("carrier count differs from sort count");
    for (std::size_t s = 0; s < carriers.size(); ++s) {
        if (carriers[s].empty())
            throw ContractError("empty carrier for sort '" + sig.sorts[s] + "'");
        std::vector<std::string> names = carriers[s];
        std::sort(names.begin(), names.end());
        if (std::adjacent_find(names.begin(), names.end()) != names.end())
            throw ContractError("duplicate element name in sort '" + sig.sorts[s] + "'");
    }
    if (tables.size() != sig.ops.size())
        throw ContractError("table count differs from operation count");
    for (std::size_t o = 0; o < tables.size(); ++o) {
        const OpSymbol& sym = sig.ops[o];
        std::uint64_t rows = 1;
        for (SortId s : sym.arg_sorts) rows *= carrier_size(s);
        if (tables[o].size() != rows)
            throw ContractError("operation table for '" + sym.name + "' is not total");
        for (std::uint32_t v : tables[o])
            if (v >= carrier_size(sym.result_sort))
                throw ContractError("operation '" + sym.name + "' produces out-of-carrier value");
    }
    for (const auto& id : sig.identities) {
        for (const auto& mu : enumerate_points(*this, id.context)) {
            if (eval_term(*this, id.context, mu, id.lhs) !=
                eval_term(*this, id.context, mu, id.rhs))
                throw ContractError("declared identity fails in the loaded algebra");
        }
    }
}

std::uint64_t Model::rel_tuple_index(RelId r, std::span<const std::uint32_t> tuple) const {
    const RelSymbol& sym = algebra->sig.rels.at(r);
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < sym.arg_sorts.size(); ++i)
        idx = idx * algebra->carrier_size(sym.arg_sorts[i]) + tuple[i];
    return idx;
}

std::optional<std::size_t> MultiModel::find_instance(std::string_view name) const {
    for (std::size_t i = 0; i < instance_names.size(); ++i)
        if (instance_names[i] == name) return i;
    return std::nullopt;
}

const Model& MultiModel::instance(std::string_view name) const {
    if (auto i = find_instance(name)) return instances[*i];
    throw ContractError("unknown instance '" + std::string(name) + "'");
}

PointSpace::PointSpace(const FiniteAlgebra& algebra, const Context& ctx,
                       std::uint64_t max_points) {
    radii_.reserve(ctx.vars.size());
    for (const auto& v : ctx.vars)
        radii_.push_back(static_cast<std::uint32_t>(algebra.carrier_size(v.sort)));
    strides_.assign(radii_.size(), 1);
    for (std::size_t i = radii_.size(); i-- > 0;) {
        if (i + 1 < radii_.size()) strides_[i] = strides_[i + 1] * radii_[i + 1];
        if (size_ > max_points / std::max<std::uint64_t>(radii_[i], 1))
            throw LimitError("point space exceeds the configured maximum of " +
                             std::to_string(max_points) + " points");
        size_ *= radii_[i];
    }
    if (size_ > max_points)
        throw LimitError("point space exceeds the configured maximum of " +
                         std::to_string(max_points) + " points");
}

std::uint64_t PointSpace::index_of(const Assignment& a) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < radii_.size(); ++i) idx += a.values[i] * strides_[i];
    return idx;
}

Assignment PointSpace::decode(std::uint64_t index) const {
    Assignment a;
    a.values.resize(radii_.size());
    decode_into(index, a.values);
    return a;
}

void PointSpace::decode_into(std::uint64_t index, std::span<std::uint32_t> out) const {
    for (std::size_t i = 0; i < radii_.size(); ++i) {
        out[i] = static_cast<std::uint32_t>(index / strides_[i]) % radii_[i];
    }
}

std::uint64_t PointSpace::with_coordinate(std::uint64_t base, std::size_t var_pos,
                                          std::uint32_t value) const {
    std::uint32_t old = coordinate(base, var_pos);
    return base + (std::uint64_t(value) - old) * strides_[var_pos];
}

std::uint32_t PointSpace::coordinate(std::uint64_t index, std::size_t var_pos) const {
    return static_cast<std::uint32_t>(index / strides_[var_pos]) % radii_[var_pos];
}

std::vector<Assignment> enumerate_points(const FiniteAlgebra& algebra, const Context& ctx,
                                         std::uint64_t max_points) {
    PointSpace space(algebra, ctx, max_points);
    std::vector<Assignment> out;
    out.reserve(space.size());
    for (std::uint64_t i = 0; i < space.size(); ++i) out.push_back(space.decode(i));
    return out;
}

std::uint32_t eval_term(const FiniteAlgebra& algebra, const Context& ctx, const Assignment& mu,
                        const Term& t) {
    if (t.kind == Term::Kind::variable) return mu.values.at(ctx.require(t.var_name));
    std::vector<std::uint32_t> args;
    args.reserve(t.args.size());
    for (const auto& a : t.args) args.push_back(eval_term(algebra, ctx, mu, a));
    return algebra.apply(t.op, args);
}

namespace {

void compile_rec(const FiniteAlgebra& algebra, const Context& ctx, const Term& t,
                 TermProgram& prog) {
    if (t.kind == Term::Kind::variable) {
        prog.instrs.push_back({static_cast<std::int32_t>(ctx.require(t.var_name)), 0, 0});
        return;
    }
    for (const auto& a : t.args) compile_rec(algebra, ctx, a, prog);
    prog.instrs.push_back({-1, t.op, static_cast<std::uint32_t>(t.args.size())});
}

}  // namespace

TermProgram compile_term(const FiniteAlgebra& algebra, const Context& ctx, const Term& t) {
    TermProgram prog;
    prog.result_sort = t.sort;
    compile_rec(algebra, ctx, t, prog);
    return prog;
}

std::uint32_t TermProgram::eval(const FiniteAlgebra& algebra,
                                std::span<const std::uint32_t> point) const {
    std::uint32_t stack[32];
    std::size_t top = 0;
    for (const auto& in : instrs) {
        if (in.var_pos >= 0) {
            stack[top++] = point[in.var_pos];
        } else {
            top -= in.argc;
            stack[top] = algebra.apply(in.op, std::span<const std::uint32_t>(stack + top, in.argc));
            ++top;
        }
    }
    return stack[0];
}

Assignment pull_point(const FiniteAlgebra& algebra, const Substitution& s, const Assignment& nu) {
    Assignment mu;
    mu.values.reserve(s.domain.vars.size());
    for (std::size_t i = 0; i < s.domain.vars.size(); ++i)
        mu.values.push_back(eval_term(algebra, s.codomain, nu, s.images[i]));
    return mu;
}

bool SortedMap::is_bijective() const {
    for (std::size_t s = 0; s < images.size(); ++s) {
        if (src->carrier_size(s) != dst->carrier_size(s)) return false;
        std::vector<bool> hit(dst->carrier_size(s), false);
        for (std::uint32_t e : images[s]) {
            if (e >= hit.size() || hit[e]) return false;
            hit[e] = true;
        }
    }
    return true;
}

bool SortedMap::is_identity() const {
    for (const auto& img : images)
        for (std::uint32_t i = 0; i < img.size(); ++i)
            if (img[i] != i) return false;
    return true;
}

SortedMap SortedMap::inverse() const {
    if (!is_bijective()) throw ContractError("cannot invert a non-bijective sorted map");
    SortedMap inv;
    inv.src = dst;
    inv.dst = src;
    inv.images.resize(images.size());
    for (std::size_t s = 0; s < images.size(); ++s) {
        inv.images[s].resize(images[s].size());
        for (std::uint32_t e = 0; e < images[s].size(); ++e) inv.images[s][images[s][e]] = e;
    }
    return inv;
}

SortedMap SortedMap::identity_map(std::shared_ptr<const FiniteAlgebra> g) {
    SortedMap m;
    m.images.resize(g->carriers.size());
    for (std::size_t s = 0; s < g->carriers.size(); ++s) {
        m.images[s].resize(g->carriers[s].size());
        for (std::uint32_t e = 0; e < m.images[s].size(); ++e) m.images[s][e] = e;
    }
    m.src = g;
    m.dst = std::move(g);
    return m;
}

namespace {

/// Walks every row of every table; returns the first violated row if any.
std::optional<std::string> find_hom_violation(const SortedMap& m) {
    const FiniteAlgebra& g1 = *m.src;
    const FiniteAlgebra& g2 = *m.dst;
    if (g1.sig.ops.size() != g2.sig.ops.size()) return "operation counts differ";
    for (OpId op = 0; op < g1.sig.ops.size(); ++op) {
        const OpSymbol& sym = g1.sig.ops[op];
        std::vector<std::uint32_t> radii;
        for (SortId s : sym.arg_sorts)
            radii.push_back(static_cast<std::uint32_t>(g1.carrier_size(s)));
        std::vector<std::uint32_t> args(sym.arg_sorts.size(), 0);
        std::vector<std::uint32_t> mapped(sym.arg_sorts.size(), 0);
        do {
            for (std::size_t i = 0; i < args.size(); ++i)
                mapped[i] = m.map(sym.arg_sorts[i], args[i]);
            std::uint32_t lhs = m.map(sym.result_sort, g1.apply(op, args));
            std::uint32_t rhs = g2.apply(op, mapped);
            if (lhs != rhs) {
                std::string row = sym.name + "(";
                for (std::size_t i = 0; i < args.size(); ++i) {
                    if (i) row += ",";
                    row += g1.element_name(sym.arg_sorts[i], args[i]);
                }
                row += ")";
                return "map does not commute with table row " + row;
            }
        } while (next_tuple(args, radii));
    }
    return std::nullopt;
}

}  // namespace

void check_homomorphism(const SortedMap& m) {
    if (auto v = find_hom_violation(m)) throw ContractError(*v);
}

bool is_homomorphism(const SortedMap& m) { return !find_hom_violation(m).has_value(); }

SortedMap compose(const SortedMap& second, const SortedMap& first) {
    SortedMap out;
    out.src = first.src;
    out.dst = second.dst;
    out.images.resize(first.images.size());
    for (std::size_t s = 0; s < first.images.size(); ++s) {
        out.images[s].resize(first.images[s].size());
        for (std::uint32_t e = 0; e < first.images[s].size(); ++e)
            out.images[s][e] = second.images[s][first.images[s][e]];
    }
    return out;
}

}  // namespace kb
