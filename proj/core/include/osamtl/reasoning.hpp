// Inconsistency estimation between extracted groundings and the knowledge
// base, and the abductive revision step that repairs every violation.
#pragma once

#include <vector>

#include "osamtl/knowledge.hpp"

namespace osamtl {

// A grounding whose value falls outside its knowledge item's admissible
// interval; magnitude is the weighted distance to the interval.
struct Inconsistency {
    int grounding_id = 0;
    int knowledge_id = 0;
    int source_sample = 0;
    double magnitude = 0.0;
};

struct ReasoningParams {
    // Magnitudes at or below this tolerance are treated as floating-point
    // noise and omitted.
    double tolerance = 1e-9;
};

struct InconsistencySet {
    std::vector<std::vector<Inconsistency>> per_sample;
    double total = 0.0;
    // Groundings whose predicate has no knowledge item; skipped, not fatal.
    int skipped_groundings = 0;

    std::size_t count() const;
};

// For each asserted grounding with value v and matching item [lo, hi] with
// weight w: magnitude = w * max(0, lo - v, v - hi). Negated groundings are
// not judged.
InconsistencySet estimate_inconsistencies(const GroundingSet& groundings,
                                          const KnowledgeBase& kb,
                                          const ReasoningParams& params);

struct AbductionParams {
    // The revision rule (clamp to the nearest admissible bound) has no free
    // knobs; the block exists so configs can address this stage.
};

// Per-sample revision bookkeeping: q_o kept, r_o - q_o negated, z_o added.
struct RevisionCounts {
    int kept = 0;
    int negated = 0;
    int added = 0;
};

struct RevisedGroundingSet {
    // Per sample: original groundings in id order (kept asserted or flipped
    // to negated), then the added corrective groundings.
    std::vector<std::vector<Grounding>> per_sample;
    std::vector<RevisionCounts> counts;

    std::size_t flattened_size() const; // == sum over samples of (r_o + z_o)
    int total_negated() const;
    int total_added() const;

    // The asserted groundings only, for re-judging against the knowledge base.
    GroundingSet asserted_subset(const GroundingParams& params) const;
};

// Negates every grounding named by an inconsistency and adds one corrective
// asserted grounding per negation whose value is the original clamped into
// the violated item's admissible interval. Re-estimating on the asserted
// subset of the result yields zero total inconsistency.
RevisedGroundingSet abduce_revisions(const InconsistencySet& inconsistencies,
                                     const GroundingSet& groundings,
                                     const KnowledgeBase& kb,
                                     const AbductionParams& params);

} // namespace osamtl
