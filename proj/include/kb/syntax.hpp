#ifndef KB_SYNTAX_HPP
#define KB_SYNTAX_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kb/diag.hpp"

namespace kb {

using SortId = std::uint32_t;
using OpId = std::uint32_t;
using RelId = std::uint32_t;

/// A typed variable list; the "place" a formula or point set lives at.
struct Context {
    struct Var {
        std::string name;
        SortId sort;
        bool operator==(const Var&) const = default;
    };
    std::vector<Var> vars;

    std::size_t size() const { return vars.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Throws ContractError when the variable is absent.
    std::size_t require(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }
    /// Rejects duplicate names and out-of-range sorts.
    void validate(std::size_t sort_count) const;

    bool operator==(const Context&) const = default;
};

/// A term of the free algebra over a context: a variable or an operation
/// applied to argument terms. Constants are 0-ary applications.
struct Term {
    enum class Kind { variable, apply };

    Kind kind = Kind::variable;
    std::string var_name;     // variable only
    OpId op = 0;              // apply only
    std::vector<Term> args;   // apply only
    SortId sort = 0;

    static Term variable(std::string name, SortId sort);
    static Term apply(OpId op, SortId result_sort, std::vector<Term> args);

    bool is_variable() const { return kind == Kind::variable; }
    std::size_t depth() const;
    void collect_vars(std::vector<std::string>& out) const;
    bool mentions_var(std::string_view name) const;

    bool operator==(const Term&) const = default;
};

struct OpSymbol {
    std::string name;
    std::vector<SortId> arg_sorts;
    SortId result_sort;
    bool operator==(const OpSymbol&) const = default;
};

struct RelSymbol {
    std::string name;
    std::vector<SortId> arg_sorts;
    bool operator==(const RelSymbol&) const = default;
};

/// A law `lhs == rhs` over a named variable context, required to hold under
/// every assignment into a loaded algebra.
struct Identity {
    Context context;
    Term lhs;
    Term rhs;
    bool operator==(const Identity&) const = default;
};

/// Sorts, operation symbols, relation symbols and optional variety laws.
struct Signature {
    std::vector<std::string> sorts;
    std::vector<OpSymbol> ops;
    std::vector<RelSymbol> rels;
    std::vector<Identity> identities;

    std::optional<SortId> find_sort(std::string_view name) const;
    std::optional<OpId> find_op(std::string_view name) const;
    std::optional<RelId> find_rel(std::string_view name) const;
    const std::string& sort_name(SortId s) const { return sorts.at(s); }

    /// Uniqueness of names per kind, declared sorts everywhere, arity rules.
    void validate() const;

    bool operator==(const Signature&) const = default;
};

/// First-order formulas over a signature. Universal quantification is not a
/// node kind: the parser rewrites `forall x. p` to `not exists x. not p`.
struct Formula {
    enum class Kind {
        verum,
        falsum,
        negation,
        conjunction,
        disjunction,
        exists,
        equality,
        relation,
    };

    Kind kind = Kind::verum;
    std::vector<Formula> kids;   // negation:1, conjunction/disjunction:2, exists:1
    std::string bound_name;      // exists only
    SortId bound_sort = 0;       // exists only
    Term lhs, rhs;               // equality only
    RelId rel = 0;               // relation only
    std::vector<Term> args;      // relation only

    static Formula verum();
    static Formula falsum();
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula exists(std::string var, SortId sort, Formula body);
    static Formula forall(std::string var, SortId sort, Formula body);
    static Formula equality(Term a, Term b);
    static Formula relation(RelId rel, std::vector<Term> args);

    void collect_free_vars(std::vector<std::string>& out) const;
    void collect_bound_vars(std::vector<Context::Var>& out) const;
    std::vector<std::string> free_vars() const;

    bool operator==(const Formula&) const = default;
};

/// Throws ContractError unless `t` is well-sorted over `ctx`.
void check_term(const Signature& sig, const Context& ctx, const Term& t);
/// Throws ContractError unless every atom of `f` is well-sorted over `ctx`
/// extended by the formula's own bound variables.
void check_formula(const Signature& sig, const Context& ctx, const Formula& f);

/// A sort-preserving map from the variables of `domain` to terms over
/// `codomain`; the syntactic arrows between places.
struct Substitution {
    Context domain;
    Context codomain;
    std::vector<Term> images;  // one term over `codomain` per domain variable

    static Substitution identity(const Context& ctx);
    const Term& image_of(std::size_t var_index) const { return images.at(var_index); }
    /// Sort-preservation variable by variable.
    void validate(const Signature& sig) const;

    bool operator==(const Substitution&) const = default;
};

/// Replaces every variable of `t` (a term over s.domain) by its image.
Term subst_term(const Substitution& s, const Term& t);

/// Composition (second ∘ first): first.domain -> second.codomain.
Substitution compose(const Substitution& second, const Substitution& first);

/// Applies `s` to a formula over s.domain, rewriting bound variables through
/// `s` as well. Defined only in the capture-free case: each bound variable
/// must map to a plain variable that does not occur in the image of any
/// other domain variable. Throws ContractError otherwise.
Formula apply_substitution(const Substitution& s, const Formula& f);

/// Relation-by-relation definitions of one signature's relations as formulas
/// over another signature (sorts and operations shared).
struct Interpretation {
    struct Definition {
        std::vector<Context::Var> params;  // sorts equal the relation's type
        Formula body;                      // over the target signature
        bool operator==(const Definition&) const = default;
    };
    /// Indexed by source RelId; absent means "no definition".
    std::vector<std::optional<Definition>> defs;

    bool operator==(const Interpretation&) const = default;
};

}  // namespace kb

#endif
