#include "osamtl/dns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace osamtl {

double NoisySample::positive_rate() const {
    if (labels.empty()) throw DataError("noisy sample " + std::to_string(id) + " is empty");
    std::size_t positives = 0;
    for (double label : labels) {
        if (is_positive(label)) ++positives;
    }
    return static_cast<double>(positives) / static_cast<double>(labels.size());
}

void NoisySample::validate() const {
    if (instances.empty()) {
        throw DataError("noisy sample " + std::to_string(id) + " has no instances");
    }
    if (instances.size() != labels.size()) {
        throw DataError("noisy sample " + std::to_string(id) + " has " +
                        std::to_string(instances.size()) + " instances but " +
                        std::to_string(labels.size()) + " labels");
    }
    const std::size_t dim = instances.front().features.size();
    for (const Instance& inst : instances) {
        if (inst.features.size() != dim) {
            throw DataError("instance " + std::to_string(inst.id) +
                            " breaks the shared feature dimension");
        }
    }
    for (double label : labels) {
        if (!std::isfinite(label) || label < 0.0 || label > 1.0) {
            throw DataError("noisy sample " + std::to_string(id) +
                            " has a label outside [0, 1]");
        }
    }
}

namespace {

double euclidean(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double mean_nn_distance(const NoisySample& from, const NoisySample& to) {
    double total = 0.0;
    for (const Instance& p : from.instances) {
        double best = std::numeric_limits<double>::infinity();
        for (const Instance& q : to.instances) {
            best = std::min(best, euclidean(p.features, q.features));
        }
        total += best;
    }
    return total / static_cast<double>(from.instances.size());
}

bool same_id_multiset(const NoisySample& a, const NoisySample& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::int64_t> ids_a, ids_b;
    ids_a.reserve(a.size());
    ids_b.reserve(b.size());
    for (const Instance& inst : a.instances) ids_a.push_back(inst.id);
    for (const Instance& inst : b.instances) ids_b.push_back(inst.id);
    std::sort(ids_a.begin(), ids_a.end());
    std::sort(ids_b.begin(), ids_b.end());
    return ids_a == ids_b;
}

void check_pair(const NoisySample& a, const NoisySample& b) {
    a.validate();
    b.validate();
    if (a.instances.front().features.size() != b.instances.front().features.size()) {
        throw DataError("samples " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                        " have different feature dimensions");
    }
}

} // namespace

double symmetric_mean_nn_distance(const NoisySample& a, const NoisySample& b) {
    return 0.5 * (mean_nn_distance(a, b) + mean_nn_distance(b, a));
}

int differentiate_instances(const NoisySample& a, const NoisySample& b,
                            const DiversityParams& params) {
    check_pair(a, b);
    if (!same_id_multiset(a, b)) return 1;
    return symmetric_mean_nn_distance(a, b) > params.instance_threshold ? 1 : 0;
}

int differentiate_labels(const NoisySample& a, const NoisySample& b,
                         const DiversityParams& params) {
    check_pair(a, b);
    if (std::abs(a.positive_rate() - b.positive_rate()) > params.label_threshold) return 1;

    // Disagreement rate on shared instance ids, when the id sets intersect.
    std::unordered_map<std::int64_t, bool> hard_a;
    hard_a.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        hard_a.emplace(a.instances[i].id, is_positive(a.labels[i]));
    }
    std::size_t shared = 0;
    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto it = hard_a.find(b.instances[i].id);
        if (it == hard_a.end()) continue;
        ++shared;
        if (it->second != is_positive(b.labels[i])) ++disagreements;
    }
    if (shared > 0) {
        const double rate = static_cast<double>(disagreements) / static_cast<double>(shared);
        if (rate > params.label_threshold) return 1;
    }
    return 0;
}

int diversity(const NoisySample& a, const NoisySample& b, const DiversityParams& params) {
    return differentiate_instances(a, b, params) * differentiate_labels(a, b, params);
}

std::size_t DiverseNoisySamples::total_instances() const {
    std::size_t n = 0;
    for (const NoisySample& sample : samples_) n += sample.size();
    return n;
}

DiverseNoisySamples validate_dns(std::vector<NoisySample> samples,
                                 const DiversityParams& params) {
    if (samples.size() < 2) {
        throw ConstraintError("diversity requires at least 2 noisy samples, got " +
                              std::to_string(samples.size()));
    }
    std::vector<std::pair<int, int>> violations;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (diversity(samples[i], samples[j], params) != 1) {
                violations.emplace_back(samples[i].id, samples[j].id);
            }
        }
    }
    if (!violations.empty()) {
        std::string message = "diversity violated for sample pairs:";
        for (const auto& [x, y] : violations) {
            message += " (" + std::to_string(x) + "," + std::to_string(y) + ")";
        }
        throw DiversityError(std::move(message), std::move(violations));
    }
    return DiverseNoisySamples(std::move(samples));
}

} // namespace osamtl
