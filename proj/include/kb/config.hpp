#ifndef KB_CONFIG_HPP
#define KB_CONFIG_HPP

#include <cstdint>
#include <optional>

namespace kb {

/// Resource caps and tunables shared by the evaluation and generation
/// operations. Defaults are sized for desk-scale finite models.
struct EngineConfig {
    /// Hard cap on |G^X| for any materialized point space.
    std::uint64_t max_points = std::uint64_t(1) << 24;
    /// Cap on materialized elements of a generated algebra (2^atoms).
    std::uint64_t max_elements = std::uint64_t(1) << 20;
    /// Cap on refinement steps when closing a generated algebra.
    std::uint64_t closure_step_cap = 1'000'000;
    /// Maximum operation-nesting depth of seed terms for algebra generation.
    std::uint32_t seed_term_depth = 2;
    /// Auxiliary-variable budget per sort; unset means sum of carrier sizes.
    std::optional<std::uint32_t> aux_budget;
};

/// Process-wide defaults, adjustable by the CLI. Operations take an explicit
/// config parameter that defaults to this object.
EngineConfig& engine_config();

}  // namespace kb

#endif
