// Data model for labeled instances, per-source noisy samples, and the binary
// pairwise diversity predicate that a valid multi-source collection must
// satisfy for every pair.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osamtl/errors.hpp"

namespace osamtl {

struct Instance {
    std::int64_t id = 0;
    std::vector<double> features;
    int sample_index = 0; // index of the owning noisy sample, 1-based
};

// One labeling source: an ordered instance sample plus its noisy labels.
// Labels are reals in [0, 1]; hard labels are stored as 0.0 / 1.0 and a
// value >= 0.5 counts as positive everywhere.
struct NoisySample {
    int id = 0;
    std::vector<Instance> instances;
    std::vector<double> labels;

    std::size_t size() const { return instances.size(); }

    // Fraction of hard-positive labels.
    double positive_rate() const;

    // Throws DataError on empty or mismatched instance/label lists,
    // non-finite labels, or inconsistent feature dimensions.
    void validate() const;
};

inline bool is_positive(double label) { return label >= 0.5; }

struct DiversityParams {
    // Minimum symmetric mean nearest-neighbor feature distance for two
    // instance samples over the same ids to count as different.
    double instance_threshold = 0.5;
    // Minimum positive-rate gap or shared-id disagreement rate for two
    // label samples to count as different.
    double label_threshold = 0.1;
};

int differentiate_instances(const NoisySample& a, const NoisySample& b,
                            const DiversityParams& params);
int differentiate_labels(const NoisySample& a, const NoisySample& b,
                         const DiversityParams& params);

// Product of the two differentiate results: 1 iff both are 1.
int diversity(const NoisySample& a, const NoisySample& b, const DiversityParams& params);

// A collection of noisy samples validated to be pairwise diverse. Only
// constructible through validate_dns.
class DiverseNoisySamples {
public:
    const std::vector<NoisySample>& samples() const { return samples_; }
    std::size_t count() const { return samples_.size(); }
    std::size_t total_instances() const;

private:
    explicit DiverseNoisySamples(std::vector<NoisySample> samples)
        : samples_(std::move(samples)) {}
    std::vector<NoisySample> samples_;

    friend DiverseNoisySamples validate_dns(std::vector<NoisySample> samples,
                                            const DiversityParams& params);
};

// Accepts the collection iff every one of the d(d-1)/2 pairs has diversity 1.
// Throws DiversityError listing all violating pairs, ConstraintError for
// fewer than two samples.
DiverseNoisySamples validate_dns(std::vector<NoisySample> samples,
                                 const DiversityParams& params);

// Symmetric mean nearest-neighbor distance between the two feature sets,
// averaged over both directions. Exposed for tests.
double symmetric_mean_nn_distance(const NoisySample& a, const NoisySample& b);

} // namespace osamtl
