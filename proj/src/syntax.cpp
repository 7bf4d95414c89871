#include "kb/syntax.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace kb {

std::optional<std::size_t> Context::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Context::require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw ContractError("variable '" + std::string(name) + "' not in context");
}

void Context::validate(std::size_t sort_count) const {
    std::unordered_set<std::string_view> seen;
    for (const auto& v : vars) {
        if (!seen.insert(v.name).second)
            throw ContractError("duplicate context variable '" + v.name + "'");
        if (v.sort >= sort_count)
            throw ContractError("context variable '" + v.name + "' has undeclared sort");
    }
}

Term Term::variable(std::string name, SortId sort) {
    Term t;
    t.kind = Kind::variable;
    t.var_name = std::move(name);
    t.sort = sort;
    return t;
}

Term Term::apply(OpId op, SortId result_sort, std::vector<Term> args) {
    Term t;
    t.kind = Kind::apply;
    t.op = op;
    t.sort = result_sort;
    t.args = std::move(args);
    return t;
}

std::size_t Term::depth() const {
    if (kind == Kind::variable) return 1;
    std::size_t d = 0;
    for (const auto& a : args) d = std::max(d, a.depth());
    return d + 1;
}

void Term::collect_vars(std::vector<std::string>& out) const {
    if (kind == Kind::variable) {
        if (std::find(out.begin(), out.end(), var_name) == out.end()) out.push_back(var_name);
        return;
    }
    for (const auto& a : args) a.collect_vars(out);
}

bool Term::mentions_var(std::string_view name) const {
    if (kind == Kind::variable) return var_name == name;
    for (const auto& a : args)
        if (a.mentions_var(name)) return true;
    return false;
}

std::optional<SortId> Signature::find_sort(std::string_view name) const {
    for (std::size_t i = 0; i < sorts.size(); ++i)
        if (sorts[i] == name) return static_cast<SortId>(i);
    return std::nullopt;
}

std::optional<OpId> Signature::find_op(std::string_view name) const {
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].name == name) return static_cast<OpId>(i);
    return std::nullopt;
}

std::optional<RelId> Signature::find_rel(std::string_view name) const {
    for (std::size_t i = 0; i < rels.size(); ++i)
        if (rels[i].name == name) return static_cast<RelId>(i);
    return std::nullopt;
}

void Signature::validate() const {
    auto check_unique = [](const auto& names, const char* kind) {
        std::unordered_set<std::string_view> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second)
                throw ContractError(std::string("duplicate ") + kind + " name '" + std::string(n) + "'");
    };
    std::vector<std::string_view> sort_names(sorts.begin(), sorts.end());
    check_unique(sort_names, "sort");
    std::vector<std::string_view> op_names;
    for (const auto& o : ops) op_names.push_back(o.name);
    check_unique(op_names, "operation");
    std::vector<std::string_view> rel_names;
    for (const auto& r : rels) rel_names.push_back(r.name);
    check_unique(rel_names, "relation");

    auto check_sort = [&](SortId s, const std::string& where) {
        if (s >= sorts.size()) throw ContractError("undeclared sort in " + where);
    };
    for (const auto& o : ops) {
        for (SortId s : o.arg_sorts) check_sort(s, "operation '" + o.name + "'");
        check_sort(o.result_sort, "operation '" + o.name + "'");
    }
    for (const auto& r : rels) {
        if (r.arg_sorts.empty())
            throw ContractError("relation '" + r.name + "' must have arity >= 1");
        for (SortId s : r.arg_sorts) check_sort(s, "relation '" + r.name + "'");
    }
    for (const auto& id : identities) {
        id.context.validate(sorts.size());
        check_term(*this, id.context, id.lhs);
        check_term(*this, id.context, id.rhs);
        if (id.lhs.sort != id.rhs.sort)
            throw ContractError("identity sides have different sorts");
    }
}

Formula Formula::verum() {
    Formula f;
    f.kind = Kind::verum;
    return f;
}

Formula Formula::falsum() {
    Formula f;
    f.kind = Kind::falsum;
    return f;
}

Formula Formula::negation(Formula body) {
    Formula f;
    f.kind = Kind::negation;
    f.kids.push_back(std::move(body));
    return f;
}

Formula Formula::conjunction(Formula a, Formula b) {
    Formula f;
    f.kind = Kind::conjunction;
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
}

Formula Formula::disjunction(Formula a, Formula b) {
    Formula f;
    f.kind = Kind::disjunction;
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
}

Formula Formula::exists(std::string var, SortId sort, Formula body) {
    Formula f;
    f.kind = Kind::exists;
    f.bound_name = std::move(var);
    f.bound_sort = sort;
    f.kids.push_back(std::move(body));
    return f;
}

Formula Formula::forall(std::string var, SortId sort, Formula body) {
    return negation(exists(std::move(var), sort, negation(std::move(body))));
}

Formula Formula::equality(Term a, Term b) {
    Formula f;
    f.kind = Kind::equality;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return f;
}

Formula Formula::relation(RelId rel, std::vector<Term> args) {
    Formula f;
    f.kind = Kind::relation;
    f.rel = rel;
    f.args = std::move(args);
    return f;
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
    auto record = [&](const Term& t) {
        std::vector<std::string> vs;
        t.collect_vars(vs);
        for (auto& v : vs) {
            if (std::find(bound.begin(), bound.end(), v) != bound.end()) continue;
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
    };
    switch (f.kind) {
        case Formula::Kind::verum:
        case Formula::Kind::falsum:
            return;
        case Formula::Kind::equality:
            record(f.lhs);
            record(f.rhs);
            return;
        case Formula::Kind::relation:
            for (const auto& a : f.args) record(a);
            return;
        case Formula::Kind::exists: {
            bound.push_back(f.bound_name);
            free_vars_rec(f.kids[0], bound, out);
            bound.pop_back();
            return;
        }
        default:
            for (const auto& k : f.kids) free_vars_rec(k, bound, out);
            return;
    }
}

}  // namespace

void Formula::collect_free_vars(std::vector<std::string>& out) const {
    std::vector<std::string> bound;
    free_vars_rec(*this, bound, out);
}

std::vector<std::string> Formula::free_vars() const {
    std::vector<std::string> out;
    collect_free_vars(out);
    return out;
}

void Formula::collect_bound_vars(std::vector<Context::Var>& out) const {
    if (kind == Kind::exists) {
        bool present = false;
        for (const auto& v : out) present = present || v.name == bound_name;
        if (!present) out.push_back({bound_name, bound_sort});
    }
    for (const auto& k : kids) k.collect_bound_vars(out);
}

void check_term(const Signature& sig, const Context& ctx, const Term& t) {
    if (t.kind == Term::Kind::variable) {
        auto i = ctx.index_of(t.var_name);
        if (!i) throw ContractError("variable '" + t.var_name + "' not in context");
        if (ctx.vars[*i].sort != t.sort)
            throw ContractError("variable '" + t.var_name + "' used at wrong sort");
        return;
    }
    if (t.op >= sig.ops.size()) throw ContractError("unknown operation id in term");
    const OpSymbol& op = sig.ops[t.op];
    if (op.arg_sorts.size() != t.args.size())
        throw ContractError("operation '" + op.name + "' applied to wrong arity");
    if (op.result_sort != t.sort)
        throw ContractError("operation '" + op.name + "' term carries wrong sort");
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (t.args[i].sort != op.arg_sorts[i])
            throw ContractError("argument " + std::to_string(i + 1) + " of '" + op.name +
                                "' has wrong sort");
        check_term(sig, ctx, t.args[i]);
    }
}

namespace {

void check_formula_rec(const Signature& sig, Context& ctx, const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::verum:
        case Formula::Kind::falsum:
            return;
        case Formula::Kind::equality:
            check_term(sig, ctx, f.lhs);
            check_term(sig, ctx, f.rhs);
            if (f.lhs.sort != f.rhs.sort)
                throw ContractError("equality between terms of different sorts");
            return;
        case Formula::Kind::relation: {
            if (f.rel >= sig.rels.size()) throw ContractError("unknown relation id in formula");
            const RelSymbol& rel = sig.rels[f.rel];
            if (rel.arg_sorts.size() != f.args.size())
                throw ContractError("relation '" + rel.name + "' applied to wrong arity");
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (f.args[i].sort != rel.arg_sorts[i])
                    throw ContractError("argument " + std::to_string(i + 1) + " of '" + rel.name +
                                        "' has wrong sort");
                check_term(sig, ctx, f.args[i]);
            }
            return;
        }
        case Formula::Kind::exists: {
            auto prev = ctx.index_of(f.bound_name);
            if (prev && ctx.vars[*prev].sort == f.bound_sort) {
                check_formula_rec(sig, ctx, f.kids[0]);
            } else if (prev) {
                throw ContractError("bound variable '" + f.bound_name + "' shadows a different sort");
            } else {
                ctx.vars.push_back({f.bound_name, f.bound_sort});
                check_formula_rec(sig, ctx, f.kids[0]);
                ctx.vars.pop_back();
            }
            return;
        }
        default:
            for (const auto& k : f.kids) check_formula_rec(sig, ctx, k);
            return;
    }
}

}  // namespace

void check_formula(const Signature& sig, const Context& ctx, const Formula& f) {
    Context scratch = ctx;
    check_formula_rec(sig, scratch, f);
}

Substitution Substitution::identity(const Context& ctx) {
    Substitution s;
    s.domain = ctx;
    s.codomain = ctx;
    for (const auto& v : ctx.vars) s.images.push_back(Term::variable(v.name, v.sort));
    return s;
}

void Substitution::validate(const Signature& sig) const {
    if (images.size() != domain.vars.size())
        throw ContractError("substitution image count differs from domain size");
    for (std::size_t i = 0; i < images.size(); ++i) {
        check_term(sig, codomain, images[i]);
        if (images[i].sort != domain.vars[i].sort)
            throw ContractError("substitution does not preserve the sort of '" +
                                domain.vars[i].name + "'");
    }
}

Term subst_term(const Substitution& s, const Term& t) {
    if (t.kind == Term::Kind::variable) {
        return s.image_of(s.domain.require(t.var_name));
    }
    Term out = t;
    for (auto& a : out.args) a = subst_term(s, a);
    return out;
}

Substitution compose(const Substitution& second, const Substitution& first) {
    if (!(first.codomain == second.domain))
        throw ContractError("substitution composition: contexts do not chain");
    Substitution out;
    out.domain = first.domain;
    out.codomain = second.codomain;
    for (const auto& img : first.images) out.images.push_back(subst_term(second, img));
    return out;
}

namespace {

Formula apply_subst_rec(const Substitution& s, const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::verum:
        case Formula::Kind::falsum:
            return f;
        case Formula::Kind::equality:
            return Formula::equality(subst_term(s, f.lhs), subst_term(s, f.rhs));
        case Formula::Kind::relation: {
            std::vector<Term> args;
            args.reserve(f.args.size());
            for (const auto& a : f.args) args.push_back(subst_term(s, a));
            return Formula::relation(f.rel, std::move(args));
        }
        case Formula::Kind::negation:
            return Formula::negation(apply_subst_rec(s, f.kids[0]));
        case Formula::Kind::conjunction:
            return Formula::conjunction(apply_subst_rec(s, f.kids[0]), apply_subst_rec(s, f.kids[1]));
        case Formula::Kind::disjunction:
            return Formula::disjunction(apply_subst_rec(s, f.kids[0]), apply_subst_rec(s, f.kids[1]));
        case Formula::Kind::exists: {
            auto idx_opt = s.domain.index_of(f.bound_name);
            if (!idx_opt) {
                // Bound variable outside the domain (fresh quantifier): keep
                // it, provided nothing in the substitution collides with it.
                if (s.codomain.contains(f.bound_name))
                    throw ContractError("substitution captures fresh bound variable '" +
                                        f.bound_name + "'");
                for (const auto& img : s.images)
                    if (img.mentions_var(f.bound_name))
                        throw ContractError("substitution captures fresh bound variable '" +
                                            f.bound_name + "'");
                Substitution ext = s;
                ext.domain.vars.push_back({f.bound_name, f.bound_sort});
                ext.codomain.vars.push_back({f.bound_name, f.bound_sort});
                ext.images.push_back(Term::variable(f.bound_name, f.bound_sort));
                return Formula::exists(f.bound_name, f.bound_sort,
                                       apply_subst_rec(ext, f.kids[0]));
            }
            // Capture-free rewrite: the bound variable must map to a plain
            // variable that no other image mentions.
            std::size_t idx = *idx_opt;
            const Term& img = s.images[idx];
            if (img.kind != Term::Kind::variable)
                throw ContractError("substitution maps bound variable '" + f.bound_name +
                                    "' to a non-variable term");
            for (std::size_t i = 0; i < s.images.size(); ++i) {
                if (i == idx) continue;
                if (s.images[i].mentions_var(img.var_name))
                    throw ContractError("substitution captures bound variable '" + f.bound_name +
                                        "' as '" + img.var_name + "'");
            }
            return Formula::exists(img.var_name, img.sort, apply_subst_rec(s, f.kids[0]));
        }
    }
    throw ContractError("unreachable formula kind");
}

}  // namespace

Formula apply_substitution(const Substitution& s, const Formula& f) {
    return apply_subst_rec(s, f);
}

}  // namespace kb
