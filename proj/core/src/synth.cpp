#include "osamtl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osamtl/rng.hpp"

namespace osamtl {

void TaskSpec::validate() const {
    if (d < 2) throw ConfigError("task needs at least 2 noisy samples, got " + std::to_string(d));
    if (static_cast<int>(n_per_sample.size()) != d) {
        throw ConfigError("n_per_sample must list exactly d sample sizes");
    }
    for (int n : n_per_sample) {
        if (n < 1) throw ConfigError("every sample size must be positive");
    }
    if (feature_dim < 1) throw ConfigError("feature_dim must be at least 1");
    if (!std::isfinite(signal_separation)) throw ConfigError("signal_separation must be finite");
    if (!(truth_positive_rate > 0.0 && truth_positive_rate < 1.0)) {
        throw ConfigError("truth_positive_rate must lie strictly inside (0, 1)");
    }
    if (static_cast<int>(noise_profiles.size()) != d) {
        throw ConfigError("noise_profiles must list exactly d profiles");
    }
    for (const NoiseProfile& profile : noise_profiles) {
        if (profile.flip_0_to_1 < 0.0 || profile.flip_0_to_1 >= 1.0 ||
            profile.flip_1_to_0 < 0.0 || profile.flip_1_to_0 >= 1.0) {
            throw ConfigError("flip rates must lie in [0, 1)");
        }
    }
    for (std::size_t a = 0; a < noise_profiles.size(); ++a) {
        for (std::size_t b = a + 1; b < noise_profiles.size(); ++b) {
            if (noise_profiles[a].flip_0_to_1 == noise_profiles[b].flip_0_to_1 &&
                noise_profiles[a].flip_1_to_0 == noise_profiles[b].flip_1_to_0) {
                throw ConfigError("noise profiles " + std::to_string(a + 1) + " and " +
                                  std::to_string(b + 1) + " are identical");
            }
        }
    }
}

std::size_t GeneratedTask::total_instances() const {
    std::size_t n = 0;
    for (const NoisySample& sample : samples) n += sample.size();
    return n;
}

namespace {

Instance draw_instance(Rng& rng, const TaskSpec& spec, int truth_label, std::int64_t id,
                       int sample_index) {
    Instance inst;
    inst.id = id;
    inst.sample_index = sample_index;
    inst.features.resize(static_cast<std::size_t>(spec.feature_dim));
    const double class_mean =
        truth_label == 1 ? spec.signal_separation / 2.0 : -spec.signal_separation / 2.0;
    inst.features[0] = rng.normal(class_mean, 1.0);
    for (int k = 1; k < spec.feature_dim; ++k) {
        inst.features[static_cast<std::size_t>(k)] = rng.normal(0.0, 1.0);
    }
    return inst;
}

std::vector<KnowledgeItem> derive_kb(const TaskSpec& spec) {
    const double rate = spec.truth_positive_rate;
    // Expected boundary density of an i.i.d. Bernoulli(rate) sequence.
    const double boundary = 2.0 * rate * (1.0 - rate);
    // Expected length of a positive run of the same sequence.
    const double run = 1.0 / (1.0 - rate);
    const double gap = std::abs(spec.signal_separation);
    return {
        KnowledgeItem{.id = 1,
                      .predicate = Predicate::positive_rate,
                      .admissible_lo = std::max(0.0, rate - 0.05),
                      .admissible_hi = std::min(1.0, rate + 0.05),
                      .weight = 1.0},
        KnowledgeItem{.id = 2,
                      .predicate = Predicate::mean_positive_run_length,
                      .admissible_lo = 0.75 * run,
                      .admissible_hi = 1.25 * run,
                      .weight = 1.0},
        KnowledgeItem{.id = 3,
                      .predicate = Predicate::positive_feature_mean_gap,
                      .admissible_lo = 0.5 * gap,
                      .admissible_hi = 1.5 * gap,
                      .weight = 1.0},
        KnowledgeItem{.id = 4,
                      .predicate = Predicate::boundary_density,
                      .admissible_lo = std::max(0.0, boundary - 0.1),
                      .admissible_hi = std::min(1.0, boundary + 0.1),
                      .weight = 1.0},
    };
}

} // namespace

GeneratedTask generate_task(const TaskSpec& spec, std::uint64_t seed, std::int64_t id_start) {
    spec.validate();
    GeneratedTask task;
    task.spec = spec;
    task.seed = seed;
    task.kb_items = derive_kb(spec);

    Rng rng(seed);
    std::int64_t next_id = id_start;
    for (int d = 0; d < spec.d; ++d) {
        const NoiseProfile& profile = spec.noise_profiles[static_cast<std::size_t>(d)];
        NoisySample sample;
        sample.id = d + 1;
        const int n = spec.n_per_sample[static_cast<std::size_t>(d)];
        sample.instances.reserve(static_cast<std::size_t>(n));
        sample.labels.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int truth_label = rng.bernoulli(spec.truth_positive_rate) ? 1 : 0;
            Instance inst = draw_instance(rng, spec, truth_label, next_id++, d + 1);
            task.truth.emplace(inst.id, truth_label);
            int noisy = truth_label;
            if (truth_label == 1) {
                if (rng.bernoulli(profile.flip_1_to_0)) noisy = 0;
            } else {
                if (rng.bernoulli(profile.flip_0_to_1)) noisy = 1;
            }
            sample.instances.push_back(std::move(inst));
            sample.labels.push_back(static_cast<double>(noisy));
        }
        task.samples.push_back(std::move(sample));
    }
    return task;
}

TestSplit generate_test_split(const TaskSpec& spec, std::uint64_t seed, int count,
                              std::int64_t id_start) {
    spec.validate();
    if (count < 1) throw ConfigError("test split needs at least one instance");
    TestSplit split;
    split.instances.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    std::int64_t next_id = id_start;
    for (int i = 0; i < count; ++i) {
        const int truth_label = rng.bernoulli(spec.truth_positive_rate) ? 1 : 0;
        Instance inst = draw_instance(rng, spec, truth_label, next_id++, 0);
        split.truth.emplace(inst.id, truth_label);
        split.instances.push_back(std::move(inst));
    }
    return split;
}

Metrics evaluate(const std::vector<std::pair<std::int64_t, double>>& predictions,
                 const std::map<std::int64_t, int>& truth, double threshold) {
    if (predictions.empty()) throw DataError("no predictions to evaluate");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& [id, score] : predictions) {
        auto it = truth.find(id);
        if (it == truth.end()) {
            throw DataError("no ground truth for instance " + std::to_string(id));
        }
        const bool predicted = score >= threshold;
        const bool actual = it->second == 1;
        if (predicted && actual) ++tp;
        else if (predicted && !actual) ++fp;
        else if (!predicted && actual) ++fn;
        else ++tn;
    }
    Metrics m;
    const auto n = static_cast<double>(predictions.size());
    m.accuracy = static_cast<double>(tp + tn) / n;
    m.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

} // namespace osamtl
