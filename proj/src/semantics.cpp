#include "kb/semantics.hpp"

#include <algorithm>

#include "kb/kernels.hpp"

namespace kb {

namespace {

void mask_tail(std::span<std::uint64_t> words, std::uint64_t npoints) {
    if (npoints & 63) words.back() &= (std::uint64_t(1) << (npoints & 63)) - 1;
}

struct Evaluator {
    const Model& m;
    const Context& ctx;
    const PointSpace& space;

    std::vector<std::uint64_t> eval(const Formula& f) const {
        switch (f.kind) {
            case Formula::Kind::verum: {
                std::vector<std::uint64_t> w(word_count(space.size()), ~std::uint64_t(0));
                mask_tail(w, space.size());
                return w;
            }
            case Formula::Kind::falsum:
                return std::vector<std::uint64_t>(word_count(space.size()), 0);
            case Formula::Kind::equality:
            case Formula::Kind::relation: {
                std::vector<std::uint64_t> w(word_count(space.size()), 0);
                eval_atomic(m, ctx, space, f, w);
                return w;
            }
            case Formula::Kind::negation: {
                auto w = eval(f.kids[0]);
                for (auto& x : w) x = ~x;
                mask_tail(w, space.size());
                return w;
            }
            case Formula::Kind::conjunction: {
                auto a = eval(f.kids[0]);
                auto b = eval(f.kids[1]);
                for (std::size_t i = 0; i < a.size(); ++i) a[i] &= b[i];
                return a;
            }
            case Formula::Kind::disjunction: {
                auto a = eval(f.kids[0]);
                auto b = eval(f.kids[1]);
                for (std::size_t i = 0; i < a.size(); ++i) a[i] |= b[i];
                return a;
            }
            case Formula::Kind::exists: {
                auto a = eval(f.kids[0]);
                std::vector<std::uint64_t> out(a.size(), 0);
                kernels::exists_var(space, ctx.require(f.bound_name), a, out);
                return out;
            }
        }
        throw ContractError("unreachable formula kind");
    }
};

/// X plus the formula's bound variables that are not already context
/// variables, in order of first appearance.
Context extended_context(const Context& X, const Formula& phi) {
    std::vector<Context::Var> bound;
    phi.collect_bound_vars(bound);
    Context ext = X;
    for (const auto& b : bound) {
        if (auto i = ext.index_of(b.name)) {
            if (ext.vars[*i].sort != b.sort)
                throw ContractError("bound variable '" + b.name + "' reused at a different sort");
            continue;
        }
        ext.vars.push_back(b);
    }
    return ext;
}

}  // namespace

void eval_atomic(const Model& m, const Context& ctx, const PointSpace& space, const Formula& atom,
                 std::span<std::uint64_t> out) {
    const FiniteAlgebra& g = *m.algebra;
    if (atom.kind == Formula::Kind::equality) {
        TermProgram lhs = compile_term(g, ctx, atom.lhs);
        TermProgram rhs = compile_term(g, ctx, atom.rhs);
        kernels::fill_equality(g, space, lhs, rhs, out);
        return;
    }
    if (atom.kind == Formula::Kind::relation) {
        std::vector<TermProgram> args;
        args.reserve(atom.args.size());
        for (const auto& a : atom.args) args.push_back(compile_term(g, ctx, a));
        kernels::fill_relation(m, space, atom.rel, args, out);
        return;
    }
    throw ContractError("eval_atomic requires an equality or relation atom");
}

PointSet val(const Model& m, const Context& X, const Formula& phi, const EngineConfig& cfg) {
    for (const auto& v : phi.free_vars()) {
        if (!X.contains(v))
            throw ContractError("free variable '" + v + "' of the formula is not in the context");
    }
    check_formula(m.algebra->sig, X, phi);

    Context ext = extended_context(X, phi);
    PointSpace ext_space(*m.algebra, ext, cfg.max_points);
    Evaluator ev{m, ext, ext_space};
    auto words = ev.eval(phi);

    if (ext.vars.size() == X.vars.size()) {
        PointSet out(m.algebra, X, false, cfg.max_points);
        std::copy(words.begin(), words.end(), out.words().begin());
        return out;
    }
    // Project the cylinder back down to X along the context inclusion.
    PointSpace x_space(*m.algebra, X, cfg.max_points);
    std::vector<TermProgram> images;
    images.reserve(X.vars.size());
    for (const auto& v : X.vars)
        images.push_back(compile_term(*m.algebra, ext, Term::variable(v.name, v.sort)));
    PointSet out(m.algebra, X, false, cfg.max_points);
    kernels::subst_image(*m.algebra, x_space, ext_space, images, words, out.words());
    return out;
}

PointSet exists_quant(const PointSet& A, std::string_view var) {
    std::size_t pos = A.context().require(var);
    PointSpace space(A.algebra(), A.context());
    PointSet out(A.algebra_ptr(), A.context());
    kernels::exists_var(space, pos, A.words(), out.words());
    return out;
}

PointSet transport_subst(const Substitution& s, const PointSet& A, TransportMode mode) {
    s.validate(A.algebra().sig);
    const FiniteAlgebra& g = A.algebra();
    PointSpace dom_space(g, s.domain);
    PointSpace cod_space(g, s.codomain);
    std::vector<TermProgram> images;
    images.reserve(s.images.size());
    for (const auto& t : s.images) images.push_back(compile_term(g, s.codomain, t));

    if (mode == TransportMode::preimage) {
        if (!(A.context() == s.domain))
            throw ContractError("preimage transport expects a set over the domain context");
        PointSet out(A.algebra_ptr(), s.codomain);
        kernels::subst_preimage(g, dom_space, cod_space, images, A.words(), out.words());
        return out;
    }
    if (!(A.context() == s.codomain))
        throw ContractError("image transport expects a set over the codomain context");
    PointSet out(A.algebra_ptr(), s.domain);
    kernels::subst_image(g, dom_space, cod_space, images, A.words(), out.words());
    return out;
}

PointSet transport_hom(const SortedMap& delta, const PointSet& A, TransportMode mode) {
    check_homomorphism(delta);
    const Context& ctx = A.context();
    PointSpace src_space(*delta.src, ctx);
    PointSpace dst_space(*delta.dst, ctx);
    std::vector<std::span<const std::uint32_t>> var_maps;
    var_maps.reserve(ctx.vars.size());
    for (const auto& v : ctx.vars) var_maps.push_back(delta.images[v.sort]);

    if (mode == TransportMode::preimage) {
        if (A.algebra_ptr() != delta.dst && !(A.algebra() == *delta.dst))
            throw ContractError("preimage transport expects a set over the destination algebra");
        PointSet out(delta.src, ctx);
        kernels::hom_preimage(src_space, dst_space, var_maps, A.words(), out.words());
        return out;
    }
    if (A.algebra_ptr() != delta.src && !(A.algebra() == *delta.src))
        throw ContractError("image transport expects a set over the source algebra");
    PointSet out(delta.dst, ctx);
    kernels::hom_image(src_space, dst_space, var_maps, A.words(), out.words());
    return out;
}

bool semantically_equivalent(const Formula& u, const Formula& v, const MultiModel& M,
                             const Context& X, const EngineConfig& cfg) {
    for (const auto& inst : M.instances) {
        if (val(inst, X, u, cfg) != val(inst, X, v, cfg)) return false;
    }
    return true;
}

}  // namespace kb
