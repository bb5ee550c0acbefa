#include "osamtl/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace osamtl {

std::string_view to_string(Predicate predicate) {
    switch (predicate) {
        case Predicate::positive_rate: return "positive_rate";
        case Predicate::mean_positive_run_length: return "mean_positive_run_length";
        case Predicate::positive_feature_mean_gap: return "positive_feature_mean_gap";
        case Predicate::boundary_density: return "boundary_density";
    }
    throw InternalError("unknown predicate tag");
}

std::optional<Predicate> predicate_from_string(std::string_view name) {
    for (Predicate predicate : kAllPredicates) {
        if (to_string(predicate) == name) return predicate;
    }
    return std::nullopt;
}

KnowledgeBase::KnowledgeBase(std::vector<KnowledgeItem> items) : items_(std::move(items)) {
    if (items_.empty()) throw ConfigError("knowledge base must contain at least one item");
    std::set<int> ids;
    std::set<Predicate> predicates;
    for (const KnowledgeItem& item : items_) {
        if (!ids.insert(item.id).second) {
            throw ConfigError("duplicate knowledge item id " + std::to_string(item.id));
        }
        if (!predicates.insert(item.predicate).second) {
            throw ConfigError("more than one knowledge item for predicate " +
                              std::string(to_string(item.predicate)));
        }
        if (!(item.admissible_lo <= item.admissible_hi)) {
            throw ConfigError("knowledge item " + std::to_string(item.id) +
                              " has an inverted admissible interval");
        }
        if (!std::isfinite(item.weight) || item.weight <= 0.0) {
            throw ConfigError("knowledge item " + std::to_string(item.id) +
                              " needs a finite positive weight");
        }
        if (!std::isfinite(item.admissible_lo) || !std::isfinite(item.admissible_hi)) {
            throw ConfigError("knowledge item " + std::to_string(item.id) +
                              " has a non-finite bound");
        }
    }
}

const KnowledgeItem* KnowledgeBase::find(Predicate predicate) const {
    for (const KnowledgeItem& item : items_) {
        if (item.predicate == predicate) return &item;
    }
    return nullptr;
}

const KnowledgeItem* KnowledgeBase::find_by_id(int id) const {
    for (const KnowledgeItem& item : items_) {
        if (item.id == id) return &item;
    }
    return nullptr;
}

std::size_t GroundingSet::total_count() const {
    std::size_t n = 0;
    for (const auto& list : per_sample) n += list.size();
    return n;
}

int GroundingSet::max_id() const {
    int best = 0;
    for (const auto& list : per_sample) {
        for (const Grounding& g : list) best = std::max(best, g.id);
    }
    return best;
}

double positive_rate_statistic(const NoisySample& sample) { return sample.positive_rate(); }

double mean_positive_run_length_statistic(const NoisySample& sample, std::size_t window) {
    if (sample.labels.empty()) throw DataError("cannot extract statistics from an empty sample");
    std::size_t run = 0;
    std::size_t run_count = 0;
    double total = 0.0;
    auto close_run = [&] {
        if (run == 0) return;
        std::size_t counted = run;
        if (window > 0) counted = std::min(counted, window);
        total += static_cast<double>(counted);
        ++run_count;
        run = 0;
    };
    for (double label : sample.labels) {
        if (is_positive(label)) {
            ++run;
        } else {
            close_run();
        }
    }
    close_run();
    if (run_count == 0) return 0.0;
    return total / static_cast<double>(run_count);
}

double positive_feature_mean_gap_statistic(const NoisySample& sample) {
    if (sample.instances.empty()) throw DataError("cannot extract statistics from an empty sample");
    if (sample.instances.front().features.empty()) {
        throw ConfigError("positive_feature_mean_gap needs at least one feature");
    }
    double positive_sum = 0.0, negative_sum = 0.0;
    std::size_t positives = 0, negatives = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f0 = sample.instances[i].features[0];
        if (is_positive(sample.labels[i])) {
            positive_sum += f0;
            ++positives;
        } else {
            negative_sum += f0;
            ++negatives;
        }
    }
    if (positives == 0 || negatives == 0) return 0.0;
    return std::abs(positive_sum / static_cast<double>(positives) -
                    negative_sum / static_cast<double>(negatives));
}

double boundary_density_statistic(const NoisySample& sample) {
    if (sample.labels.empty()) throw DataError("cannot extract statistics from an empty sample");
    if (sample.labels.size() == 1) return 0.0;
    std::size_t transitions = 0;
    for (std::size_t i = 1; i < sample.labels.size(); ++i) {
        if (is_positive(sample.labels[i]) != is_positive(sample.labels[i - 1])) ++transitions;
    }
    return static_cast<double>(transitions) / static_cast<double>(sample.labels.size() - 1);
}

double statistic(Predicate predicate, const NoisySample& sample, const GroundingParams& params) {
    switch (predicate) {
        case Predicate::positive_rate:
            return positive_rate_statistic(sample);
        case Predicate::mean_positive_run_length:
            return mean_positive_run_length_statistic(sample, params.run_length_window);
        case Predicate::positive_feature_mean_gap:
            return positive_feature_mean_gap_statistic(sample);
        case Predicate::boundary_density:
            return boundary_density_statistic(sample);
    }
    throw InternalError("unknown predicate tag");
}

GroundingSet extract_groundings(std::span<const NoisySample> samples,
                                const GroundingParams& params) {
    if (samples.empty()) throw DataError("no samples to extract groundings from");
    if (params.enabled.empty()) throw ConfigError("no predicates enabled for extraction");
    {
        std::set<Predicate> seen;
        for (Predicate predicate : params.enabled) {
            if (!seen.insert(predicate).second) {
                throw ConfigError("predicate " + std::string(to_string(predicate)) +
                                  " enabled twice");
            }
        }
    }

    GroundingSet result;
    result.params = params;
    result.per_sample.reserve(samples.size());
    int next_id = 1;
    for (std::size_t d = 0; d < samples.size(); ++d) {
        const NoisySample& sample = samples[d];
        sample.validate();
        std::vector<Grounding> list;
        list.reserve(params.enabled.size());
        for (Predicate predicate : params.enabled) {
            list.push_back(Grounding{
                .id = next_id++,
                .source_sample = static_cast<int>(d) + 1,
                .predicate = predicate,
                .observed_value = statistic(predicate, sample, params),
                .polarity = Polarity::asserted,
            });
        }
        result.per_sample.push_back(std::move(list));
    }
    return result;
}

GroundingSet extract_groundings(const DiverseNoisySamples& dns, const GroundingParams& params) {
    return extract_groundings(std::span<const NoisySample>(dns.samples()), params);
}

} // namespace osamtl
