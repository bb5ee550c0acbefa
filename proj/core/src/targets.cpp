#include "osamtl/targets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace osamtl {

namespace {

// Repaired positive rate for a sample: the asserted positive_rate grounding
// after revision (the corrective value when the original was negated), or
// the observed rate when that predicate was never extracted.
double repaired_rate(const std::vector<Grounding>& revised, const NoisySample& sample) {
    for (const Grounding& g : revised) {
        if (g.predicate == Predicate::positive_rate && g.polarity == Polarity::asserted) {
            return g.observed_value;
        }
    }
    return sample.positive_rate();
}

// Instance positions ranked by confidence: noisy positives first, then noisy
// negatives, each block by descending feature[0] with position as tie-break.
std::vector<std::size_t> confidence_ranking(const NoisySample& sample) {
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        (is_positive(sample.labels[i]) ? positives : negatives).push_back(i);
    }
    auto by_score = [&](std::size_t a, std::size_t b) {
        const double fa = sample.instances[a].features.empty() ? 0.0
                                                               : sample.instances[a].features[0];
        const double fb = sample.instances[b].features.empty() ? 0.0
                                                               : sample.instances[b].features[0];
        if (fa != fb) return fa > fb;
        return a < b;
    };
    std::sort(positives.begin(), positives.end(), by_score);
    std::sort(negatives.begin(), negatives.end(), by_score);
    positives.insert(positives.end(), negatives.begin(), negatives.end());
    return positives;
}

} // namespace

TargetSet abduce_targets(const RevisedGroundingSet& revised,
                         std::span<const NoisySample> samples,
                         const KnowledgeBase& kb,
                         const TargetParams& params) {
    if (params.targets_per_sample < 1) {
        throw ConfigError("targets_per_sample must be at least 1, got " +
                          std::to_string(params.targets_per_sample));
    }
    const KnowledgeItem* rate_item = kb.find(Predicate::positive_rate);
    if (rate_item == nullptr) {
        throw ConfigError("target abduction needs a positive_rate knowledge item");
    }
    if (revised.per_sample.size() != samples.size()) {
        throw InternalError("revised grounding set does not cover every sample");
    }

    const int t = params.targets_per_sample;
    TargetSet result;
    result.params = params;
    result.targets.reserve(samples.size() * static_cast<std::size_t>(t));
    int next_id = 1;

    for (std::size_t d = 0; d < samples.size(); ++d) {
        const NoisySample& sample = samples[d];
        sample.validate();
        const auto n = static_cast<long long>(sample.size());

        long long under_count =
            static_cast<long long>(std::ceil(rate_item->admissible_lo * static_cast<double>(n)));
        long long over_count =
            static_cast<long long>(std::floor(rate_item->admissible_hi * static_cast<double>(n)));
        under_count = std::clamp(under_count, 0ll, n);
        over_count = std::clamp(over_count, 0ll, n);

        auto inside = [&](long long k) {
            const double rate = static_cast<double>(k) / static_cast<double>(n);
            return rate >= rate_item->admissible_lo && rate <= rate_item->admissible_hi;
        };
        bool degenerate = !inside(under_count) || !inside(over_count);
        if (under_count > over_count) {
            // Interval narrower than the rounding granularity.
            under_count = over_count;
            degenerate = true;
        }

        const std::vector<std::size_t> ranking = confidence_ranking(sample);
        const double rho = repaired_rate(revised.per_sample[d], sample);

        for (int j = 0; j < t; ++j) {
            long long k = under_count;
            if (t > 1) {
                const double frac = static_cast<double>(j) / static_cast<double>(t - 1);
                k = under_count +
                    std::llround(static_cast<double>(over_count - under_count) * frac);
            }
            AbducedTarget target;
            target.target_id = next_id++;
            target.source_sample = static_cast<int>(d) + 1;
            target.bias = j < (t + 1) / 2 ? TargetBias::under : TargetBias::over;
            target.labels.assign(sample.size(), 0.0);
            for (long long r = 0; r < k; ++r) {
                target.labels[ranking[static_cast<std::size_t>(r)]] = 1.0;
            }
            target.groundings_used = static_cast<int>(revised.per_sample[d].size());
            target.instances_used = static_cast<int>(sample.size());
            target.repaired_positive_rate = rho;
            target.degenerate = degenerate;
            result.targets.push_back(std::move(target));
        }
    }
    return result;
}

RearrangedTargets rearrange_targets(const TargetSet& targets,
                                    std::span<const NoisySample> samples,
                                    const RearrangeParams& /*params*/) {
    const std::size_t d = samples.size();
    if (d == 0) throw DataError("no samples to rearrange targets onto");
    const std::size_t m = targets.count();
    if (m % d != 0) {
        throw ConstraintError("target count " + std::to_string(m) +
                              " is not divisible by sample count " + std::to_string(d));
    }
    const std::size_t p = m / d;
    if (p <= 1) {
        throw ConstraintError("each instance must receive more than one target, got p = " +
                              std::to_string(p));
    }

    std::vector<std::vector<const AbducedTarget*>> by_sample(d);
    for (const AbducedTarget& target : targets.targets) {
        if (target.source_sample < 1 || static_cast<std::size_t>(target.source_sample) > d) {
            throw DataError("target " + std::to_string(target.target_id) +
                            " references unknown sample index " +
                            std::to_string(target.source_sample));
        }
        by_sample[static_cast<std::size_t>(target.source_sample) - 1].push_back(&target);
    }

    RearrangedTargets result;
    result.targets_per_instance = static_cast<int>(p);
    result.instances.reserve(samples.empty() ? 0 : m / p * samples[0].size());

    for (std::size_t o = 0; o < d; ++o) {
        auto& group = by_sample[o];
        if (group.size() != p) {
            throw ConstraintError("sample " + std::to_string(o + 1) + " has " +
                                  std::to_string(group.size()) + " targets, expected " +
                                  std::to_string(p));
        }
        std::sort(group.begin(), group.end(),
                  [](const AbducedTarget* a, const AbducedTarget* b) {
                      if (a->bias != b->bias) return a->bias == TargetBias::under;
                      return a->target_id < b->target_id;
                  });
        const NoisySample& sample = samples[o];
        for (const AbducedTarget* target : group) {
            if (target->labels.size() != sample.size()) {
                throw DataError("target " + std::to_string(target->target_id) +
                                " does not align with sample " + std::to_string(o + 1));
            }
        }
        for (std::size_t i = 0; i < sample.size(); ++i) {
            InstanceTargets entry;
            entry.instance_id = sample.instances[i].id;
            entry.sample_index = static_cast<int>(o) + 1;
            entry.targets.reserve(p);
            for (const AbducedTarget* target : group) {
                entry.targets.push_back(target->labels[i]);
            }
            result.instances.push_back(std::move(entry));
        }
    }
    return result;
}

} // namespace osamtl
