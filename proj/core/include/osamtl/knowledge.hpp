// Knowledge base of admissible-range constraints and extraction of logical
// groundings (per-sample label statistics) that those constraints judge.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "osamtl/dns.hpp"

namespace osamtl {

enum class Predicate {
    positive_rate,
    mean_positive_run_length,
    positive_feature_mean_gap,
    boundary_density,
};

inline constexpr std::array<Predicate, 4> kAllPredicates = {
    Predicate::positive_rate,
    Predicate::mean_positive_run_length,
    Predicate::positive_feature_mean_gap,
    Predicate::boundary_density,
};

std::string_view to_string(Predicate predicate);
std::optional<Predicate> predicate_from_string(std::string_view name);

// One expert constraint: values of `predicate` on the true target are
// believed to lie in [admissible_lo, admissible_hi]; weight scales how hard
// a violation counts.
struct KnowledgeItem {
    int id = 0;
    Predicate predicate = Predicate::positive_rate;
    double admissible_lo = 0.0;
    double admissible_hi = 1.0;
    double weight = 1.0;
};

class KnowledgeBase {
public:
    // Throws ConfigError on empty lists, duplicate ids, duplicate
    // predicates, inverted intervals, or non-positive weights.
    explicit KnowledgeBase(std::vector<KnowledgeItem> items);

    const std::vector<KnowledgeItem>& items() const { return items_; }
    const KnowledgeItem* find(Predicate predicate) const;
    const KnowledgeItem* find_by_id(int id) const;

private:
    std::vector<KnowledgeItem> items_;
};

enum class Polarity { asserted, negated };

// A logical fact extracted from one noisy sample: "predicate evaluates to
// observed_value on sample source_sample".
struct Grounding {
    int id = 0;
    int source_sample = 0; // 1-based sample index
    Predicate predicate = Predicate::positive_rate;
    double observed_value = 0.0;
    Polarity polarity = Polarity::asserted;
};

struct GroundingParams {
    // Predicates to extract, in extraction order.
    std::vector<Predicate> enabled{kAllPredicates.begin(), kAllPredicates.end()};
    // Cap on the counted length of a positive run; 0 means uncapped.
    std::size_t run_length_window = 0;
};

struct GroundingSet {
    std::vector<std::vector<Grounding>> per_sample;
    GroundingParams params;

    std::size_t total_count() const;
    int max_id() const;
};

// Per-sample label statistics. Run/boundary statistics use the instance list
// order as adjacency; the datasets here are ordered sequences.
double positive_rate_statistic(const NoisySample& sample);
double mean_positive_run_length_statistic(const NoisySample& sample, std::size_t window = 0);
double positive_feature_mean_gap_statistic(const NoisySample& sample);
double boundary_density_statistic(const NoisySample& sample);
double statistic(Predicate predicate, const NoisySample& sample, const GroundingParams& params);

// One asserted grounding per enabled predicate per sample, ids assigned
// sequentially in (sample, enabled-order) order starting at 1.
GroundingSet extract_groundings(std::span<const NoisySample> samples,
                                const GroundingParams& params);
GroundingSet extract_groundings(const DiverseNoisySamples& dns, const GroundingParams& params);

} // namespace osamtl
