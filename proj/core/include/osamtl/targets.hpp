// Construction of knowledge-consistent relabelings (one under-biased and one
// over-biased target per sample by default) and their rearrangement into a
// per-instance list of exactly p targets.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osamtl/dns.hpp"
#include "osamtl/reasoning.hpp"

namespace osamtl {

enum class TargetBias { under, over };

struct AbducedTarget {
    int target_id = 0;
    int source_sample = 0; // 1-based
    TargetBias bias = TargetBias::under;
    // One value per instance of the source sample, in instance order.
    std::vector<double> labels;

    // Provenance: how much revised-grounding and instance material this
    // target consumed, and the repaired rate that anchored it.
    int groundings_used = 0;
    int instances_used = 0;
    double repaired_positive_rate = 0.0;
    // True when integer rounding could not place the positive count inside
    // the admissible interval and the count was clamped.
    bool degenerate = false;
};

struct TargetParams {
    // Number of targets abduced per sample; 2 gives the under/over pair.
    // Values above 2 interpolate positive counts between the two extremes.
    int targets_per_sample = 2;
};

struct TargetSet {
    std::vector<AbducedTarget> targets;
    TargetParams params;

    std::size_t count() const { return targets.size(); }
};

// For each sample: rank instances as noisy positives (by descending
// feature[0], the confidence score) followed by noisy negatives (same
// order), then mark the first k positive. The under target uses
// k = ceil(lo * n), the over target k = floor(hi * n), where [lo, hi] is the
// knowledge base's positive_rate interval. Throws ConfigError when that
// item is missing.
TargetSet abduce_targets(const RevisedGroundingSet& revised,
                         std::span<const NoisySample> samples,
                         const KnowledgeBase& kb,
                         const TargetParams& params);

struct RearrangeParams {
    // Slot order is fixed: under-biased targets first, then over-biased,
    // ties broken by target id. No free knobs yet.
};

// One instance together with its p rearranged target values.
struct InstanceTargets {
    std::int64_t instance_id = 0;
    int sample_index = 0;
    std::vector<double> targets;
};

struct RearrangedTargets {
    std::vector<InstanceTargets> instances; // size n = sum of sample sizes
    int targets_per_instance = 0;           // p = m / d, always > 1
};

// Groups the m targets by source sample and flattens so that every instance
// carries the p values at its position. Throws ConstraintError when m is
// not divisible by d or when p would be 1.
RearrangedTargets rearrange_targets(const TargetSet& targets,
                                    std::span<const NoisySample> samples,
                                    const RearrangeParams& params);

} // namespace osamtl
