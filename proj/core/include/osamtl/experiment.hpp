// End-to-end orchestration: one config drives generation, diversity
// validation, grounding extraction, inconsistency repair, target abduction,
// rearrangement, training, and held-out evaluation, for the multi-sample
// method and two baselines across a list of seeds.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "osamtl/dns.hpp"
#include "osamtl/knowledge.hpp"
#include "osamtl/learner.hpp"
#include "osamtl/reasoning.hpp"
#include "osamtl/synth.hpp"
#include "osamtl/targets.hpp"

namespace osamtl {

struct ModelSpec {
    Architecture architecture = Architecture::linear;
    int hidden_width = 8; // used by one_hidden only
};

struct ExperimentConfig {
    TaskSpec task;
    DiversityParams diversity;
    GroundingParams grounding;
    ReasoningParams reasoning;
    AbductionParams abduction;
    TargetParams target;
    RearrangeParams rearrange;
    LossConfig loss;
    OptimConfig optim;
    ModelSpec model;
    std::vector<std::uint64_t> seeds;
    double test_fraction = 0.2;
    std::string out_dir = "out";

    void validate() const; // throws ConfigError
};

// The default experiment: three 2000-instance sources with over-labeling,
// under-labeling, and symmetric noise over a 0.3-rate truth.
ExperimentConfig default_config();

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text); // throws ConfigError
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Method identifiers used in reports.
inline constexpr const char* kMethodDns = "osamtl_dns";
inline constexpr const char* kMethodSingle = "osamtl_single_sample_d";
inline constexpr const char* kMethodPooled = "raw_noisy_pooled";

struct MethodResult {
    bool ok = false;
    Metrics metrics;
    double train_seconds = 0.0;
    // Which source the single-sample method settled on; 0 elsewhere.
    int best_sample = 0;
    // Stage name and message when the run aborted.
    std::string failed_stage;
    std::string error;
};

struct SeedResult {
    std::uint64_t seed = 0;
    MethodResult dns;
    MethodResult single_best;
    MethodResult pooled;
};

struct MethodAggregate {
    int runs = 0; // successful cells
    Metrics mean;
    Metrics stddev; // sample standard deviation, 0 for fewer than 2 runs
};

struct ComparisonReport {
    ExperimentConfig config;
    std::vector<SeedResult> per_seed;

    MethodAggregate aggregate_dns() const;
    MethodAggregate aggregate_single() const;
    MethodAggregate aggregate_pooled() const;
};

// Stage seed derivations, shared by the pipeline and the standalone CLI
// stages so both produce identical artifacts.
std::uint64_t test_split_seed(std::uint64_t seed);
std::uint64_t model_init_seed(std::uint64_t seed);
std::uint64_t shuffle_seed(std::uint64_t seed);

// Number of held-out instances for a config (test_fraction of the total).
int test_split_size(const ExperimentConfig& config);

// Builds training examples by joining rearranged targets with the instances
// that own them.
TrainingSet to_training_set(const RearrangedTargets& targets,
                            std::span<const NoisySample> samples);

// Runs every seed (in parallel when jobs > 1; results are independent of
// the job count) and assembles the comparison.
ComparisonReport run_pipeline(const ExperimentConfig& config, int jobs = 1);

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

// Deterministic serializations. Wall-clock timings are kept out of these and
// written separately, so identical runs produce identical bytes.
std::string report_to_json(const ComparisonReport& report);
std::string report_summary_csv(const ComparisonReport& report);
std::string report_timings_csv(const ComparisonReport& report);

// Writes report.json, summary.csv, and timings.csv under out_dir.
void write_report_files(const ComparisonReport& report,
                        const std::filesystem::path& out_dir);

} // namespace osamtl
