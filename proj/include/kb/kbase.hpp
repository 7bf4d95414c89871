#ifndef KB_KBASE_HPP
#define KB_KBASE_HPP

#include <string_view>

#include "kb/galois.hpp"

namespace kb {

/// A knowledge base: a multi-model plus the resource configuration its
/// queries run under.
struct KnowledgeBase {
    MultiModel multimodel;
    EngineConfig config;
};

/// Reply to a query: the content of the description in the named instance.
PointSet query(const KnowledgeBase& kb, std::string_view instance, const Description& d);

/// The pointwise map induced by an admissible substitution between two
/// query replies, or the rejection witness when s is not admissible.
struct InducedContentMap {
    bool admissible = false;
    /// Pairs (point index over d1's context, image index over d2's context),
    /// in point order of the source content.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> mapping;
    /// A point of content(d1) violating admissibility, when rejected.
    std::string violation;
};

InducedContentMap induced_content_map(const KnowledgeBase& kb, std::string_view instance,
                                      const Substitution& s, const Description& d1,
                                      const Description& d2);

}  // namespace kb

#endif
