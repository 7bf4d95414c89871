#ifndef KB_PARSER_HPP
#define KB_PARSER_HPP

#include <string>
#include <string_view>

#include "kb/autgroup.hpp"
#include "kb/galois.hpp"

namespace kb {

/// Parses the line-oriented model format (.kbm). Throws ParseError with a
/// located diagnostic on malformed input; the returned multi-model satisfies
/// all structural invariants including declared identities.
MultiModel parse_model(std::string_view text, std::string_view filename = "<input>");

/// Parses one formula over `ctx`. Bound variables must be context variables
/// unless `allow_fresh_bound` is set, in which case `exists z:sort.` style
/// annotations introduce fresh ones. `forall` is rewritten to not/exists.
Formula parse_formula(std::string_view text, const Signature& sig, const Context& ctx,
                      std::string_view filename = "<formula>", bool allow_fresh_bound = false);

/// Parses a query file (.kbq): a `vars ...;` header followed by one formula
/// per line.
Description parse_query(std::string_view text, const Signature& sig,
                        std::string_view filename = "<query>");

/// Parses a `x:s, y:t` variable list (CLI --vars syntax). Empty input yields
/// the empty context.
Context parse_context(std::string_view text, const Signature& sig,
                      std::string_view filename = "<vars>");

/// Parses a witness file (.kbw) against the two multi-models it relates.
EquivalenceWitness parse_witness(std::string_view text, const MultiModel& left,
                                 const MultiModel& right,
                                 std::string_view filename = "<witness>");

// Canonical serializers. Parse-then-serialize is the identity on canonical
// text; serialize-then-parse reproduces the value exactly.

std::string serialize_model(const MultiModel& m);
std::string serialize_term(const Term& t, const Signature& sig);
/// Bound variables outside `ctx` are printed with a sort annotation.
std::string serialize_formula(const Formula& f, const Signature& sig, const Context& ctx);
std::string serialize_query(const Description& d, const Signature& sig);
std::string serialize_witness(const EquivalenceWitness& w, const MultiModel& left,
                              const MultiModel& right);

}  // namespace kb

#endif
