// Synthetic binary task with known ground truth: several labeling sources
// with distinct flip-noise profiles over disjoint instances, plus a matching
// knowledge base derived from the generative parameters. Also the evaluation
// metrics used everywhere.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "osamtl/dns.hpp"
#include "osamtl/knowledge.hpp"

namespace osamtl {

struct NoiseProfile {
    double flip_0_to_1 = 0.0; // chance a true negative is labeled positive
    double flip_1_to_0 = 0.0; // chance a true positive is labeled negative
};

struct TaskSpec {
    int d = 2;
    std::vector<int> n_per_sample;
    int feature_dim = 1;
    // Gap between the class means of feature[0]; the remaining features are
    // pure noise.
    double signal_separation = 2.0;
    double truth_positive_rate = 0.5;
    std::vector<NoiseProfile> noise_profiles;

    void validate() const; // throws ConfigError
};

struct GeneratedTask {
    // Pre-validation samples; the pipeline runs them through validate_dns.
    std::vector<NoisySample> samples;
    std::map<std::int64_t, int> truth; // instance id -> {0, 1}
    std::vector<KnowledgeItem> kb_items;
    TaskSpec spec;
    std::uint64_t seed = 0;

    std::size_t total_instances() const;
};

// Deterministic per (spec, seed). Instance ids are disjoint across samples,
// counted up from id_start.
GeneratedTask generate_task(const TaskSpec& spec, std::uint64_t seed,
                            std::int64_t id_start = 1);

// Fresh clean instances from the same generative process, for held-out
// evaluation.
struct TestSplit {
    std::vector<Instance> instances;
    std::map<std::int64_t, int> truth;
};

TestSplit generate_test_split(const TaskSpec& spec, std::uint64_t seed, int count,
                              std::int64_t id_start);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Hard-thresholds the predictions and computes confusion-count metrics.
// Degenerate conventions: precision (recall) is 1 when no positives were
// predicted (exist); f1 is 0 when precision + recall is 0.
Metrics evaluate(const std::vector<std::pair<std::int64_t, double>>& predictions,
                 const std::map<std::int64_t, int>& truth, double threshold = 0.5);

} // namespace osamtl
