#include "osamtl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "osamtl/io.hpp"
#include "osamtl/rng.hpp"

namespace osamtl {

using json = nlohmann::ordered_json;

namespace {

std::string_view to_string(Architecture arch) {
    return arch == Architecture::linear ? "linear" : "one_hidden";
}

Architecture architecture_from_string(const std::string& name) {
    if (name == "linear") return Architecture::linear;
    if (name == "one_hidden") return Architecture::one_hidden;
    throw ConfigError("unknown architecture '" + name + "'");
}

std::string_view to_string(BaseLoss loss) {
    return loss == BaseLoss::binary_cross_entropy ? "binary_cross_entropy" : "squared_error";
}

BaseLoss base_loss_from_string(const std::string& name) {
    if (name == "binary_cross_entropy") return BaseLoss::binary_cross_entropy;
    if (name == "squared_error") return BaseLoss::squared_error;
    throw ConfigError("unknown base loss '" + name + "'");
}

std::string_view to_string(OptimizerKind kind) {
    return kind == OptimizerKind::gradient_descent ? "gradient_descent" : "momentum";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "gradient_descent") return OptimizerKind::gradient_descent;
    if (name == "momentum") return OptimizerKind::momentum;
    throw ConfigError("unknown optimizer '" + name + "'");
}

json config_json(const ExperimentConfig& c) {
    json task;
    task["d"] = c.task.d;
    task["n_per_sample"] = c.task.n_per_sample;
    task["feature_dim"] = c.task.feature_dim;
    task["signal_separation"] = c.task.signal_separation;
    task["truth_positive_rate"] = c.task.truth_positive_rate;
    task["noise_profiles"] = json::array();
    for (const NoiseProfile& p : c.task.noise_profiles) {
        task["noise_profiles"].push_back(
            {{"flip_0_to_1", p.flip_0_to_1}, {"flip_1_to_0", p.flip_1_to_0}});
    }

    json grounding;
    grounding["predicates"] = json::array();
    for (Predicate predicate : c.grounding.enabled) {
        grounding["predicates"].push_back(std::string(to_string(predicate)));
    }
    grounding["run_length_window"] = c.grounding.run_length_window;

    json root;
    root["task"] = std::move(task);
    root["diversity"] = {{"instance_threshold", c.diversity.instance_threshold},
                         {"label_threshold", c.diversity.label_threshold}};
    root["grounding"] = std::move(grounding);
    root["reasoning"] = {{"tolerance", c.reasoning.tolerance}};
    root["abduction"] = json::object();
    root["targets"] = {{"targets_per_sample", c.target.targets_per_sample}};
    root["rearrange"] = json::object();
    root["loss"] = {{"base_loss", std::string(to_string(c.loss.base_loss))},
                    {"alphas", c.loss.alphas}};
    root["optim"] = {{"learning_rate", c.optim.learning_rate},
                     {"epochs", c.optim.epochs},
                     {"batch_size", c.optim.batch_size},
                     {"seed", c.optim.seed},
                     {"optimizer", std::string(to_string(c.optim.optimizer))},
                     {"momentum_beta", c.optim.momentum_beta}};
    root["model"] = {{"architecture", std::string(to_string(c.model.architecture))},
                     {"hidden_width", c.model.hidden_width}};
    root["seeds"] = c.seeds;
    root["test_fraction"] = c.test_fraction;
    root["out_dir"] = c.out_dir;
    return root;
}

ExperimentConfig config_from(const json& root) {
    ExperimentConfig c;
    const json& task = root.at("task");
    c.task.d = task.at("d").get<int>();
    c.task.n_per_sample = task.at("n_per_sample").get<std::vector<int>>();
    c.task.feature_dim = task.at("feature_dim").get<int>();
    c.task.signal_separation = task.at("signal_separation").get<double>();
    c.task.truth_positive_rate = task.at("truth_positive_rate").get<double>();
    for (const json& p : task.at("noise_profiles")) {
        c.task.noise_profiles.push_back(NoiseProfile{p.at("flip_0_to_1").get<double>(),
                                                     p.at("flip_1_to_0").get<double>()});
    }

    if (root.contains("diversity")) {
        const json& diversity = root["diversity"];
        c.diversity.instance_threshold =
            diversity.value("instance_threshold", c.diversity.instance_threshold);
        c.diversity.label_threshold =
            diversity.value("label_threshold", c.diversity.label_threshold);
    }
    if (root.contains("grounding")) {
        const json& grounding = root["grounding"];
        if (grounding.contains("predicates")) {
            c.grounding.enabled.clear();
            for (const json& name : grounding["predicates"]) {
                const auto predicate = predicate_from_string(name.get<std::string>());
                if (!predicate) {
                    throw ConfigError("unknown predicate '" + name.get<std::string>() + "'");
                }
                c.grounding.enabled.push_back(*predicate);
            }
        }
        c.grounding.run_length_window =
            grounding.value("run_length_window", c.grounding.run_length_window);
    }
    if (root.contains("reasoning")) {
        c.reasoning.tolerance = root["reasoning"].value("tolerance", c.reasoning.tolerance);
    }
    if (root.contains("targets")) {
        c.target.targets_per_sample =
            root["targets"].value("targets_per_sample", c.target.targets_per_sample);
    }
    const json& loss = root.at("loss");
    c.loss.base_loss = base_loss_from_string(loss.at("base_loss").get<std::string>());
    c.loss.alphas = loss.at("alphas").get<std::vector<double>>();
    const json& optim = root.at("optim");
    c.optim.learning_rate = optim.at("learning_rate").get<double>();
    c.optim.epochs = optim.at("epochs").get<int>();
    c.optim.batch_size = optim.at("batch_size").get<int>();
    c.optim.seed = optim.value("seed", std::uint64_t{0});
    c.optim.optimizer =
        optimizer_from_string(optim.value("optimizer", std::string("gradient_descent")));
    c.optim.momentum_beta = optim.value("momentum_beta", c.optim.momentum_beta);
    const json& model = root.at("model");
    c.model.architecture = architecture_from_string(model.at("architecture").get<std::string>());
    c.model.hidden_width = model.value("hidden_width", c.model.hidden_width);
    c.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    c.test_fraction = root.value("test_fraction", c.test_fraction);
    c.out_dir = root.value("out_dir", c.out_dir);
    return c;
}

json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1}};
}

json cell_json(const MethodResult& cell, bool with_best_sample) {
    json j;
    j["ok"] = cell.ok;
    if (cell.ok) {
        j["metrics"] = metrics_json(cell.metrics);
        if (with_best_sample) j["best_sample"] = cell.best_sample;
    } else {
        j["failed_stage"] = cell.failed_stage;
        j["error"] = cell.error;
    }
    return j;
}

MethodAggregate aggregate_over(const std::vector<SeedResult>& per_seed,
                               const MethodResult SeedResult::*cell) {
    MethodAggregate agg;
    std::vector<Metrics> rows;
    for (const SeedResult& seed : per_seed) {
        const MethodResult& r = seed.*cell;
        if (r.ok) rows.push_back(r.metrics);
    }
    agg.runs = static_cast<int>(rows.size());
    if (rows.empty()) return agg;
    auto mean_of = [&](double Metrics::*field) {
        double sum = 0.0;
        for (const Metrics& m : rows) sum += m.*field;
        return sum / static_cast<double>(rows.size());
    };
    auto std_of = [&](double Metrics::*field, double mean) {
        if (rows.size() < 2) return 0.0;
        double sum = 0.0;
        for (const Metrics& m : rows) {
            const double diff = m.*field - mean;
            sum += diff * diff;
        }
        return std::sqrt(sum / static_cast<double>(rows.size() - 1));
    };
    agg.mean.accuracy = mean_of(&Metrics::accuracy);
    agg.mean.precision = mean_of(&Metrics::precision);
    agg.mean.recall = mean_of(&Metrics::recall);
    agg.mean.f1 = mean_of(&Metrics::f1);
    agg.stddev.accuracy = std_of(&Metrics::accuracy, agg.mean.accuracy);
    agg.stddev.precision = std_of(&Metrics::precision, agg.mean.precision);
    agg.stddev.recall = std_of(&Metrics::recall, agg.mean.recall);
    agg.stddev.f1 = std_of(&Metrics::f1, agg.mean.f1);
    return agg;
}

} // namespace

void ExperimentConfig::validate() const {
    task.validate();
    optim.validate();
    loss.validate();
    if (static_cast<int>(loss.alphas.size()) != target.targets_per_sample) {
        throw ConfigError("loss carries " + std::to_string(loss.alphas.size()) +
                          " alpha weights but targets_per_sample is " +
                          std::to_string(target.targets_per_sample));
    }
    if (target.targets_per_sample < 1) throw ConfigError("targets_per_sample must be positive");
    if (grounding.enabled.empty()) throw ConfigError("no predicates enabled for extraction");
    if (seeds.empty()) throw ConfigError("seed list is empty");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie strictly inside (0, 1)");
    }
    if (model.architecture == Architecture::one_hidden && model.hidden_width < 1) {
        throw ConfigError("hidden_width must be positive for the one_hidden architecture");
    }
    if (!(diversity.instance_threshold >= 0.0) ||
        !std::isfinite(diversity.instance_threshold)) {
        throw ConfigError("instance_threshold must be finite and non-negative");
    }
    if (!(diversity.label_threshold >= 0.0 && diversity.label_threshold <= 1.0)) {
        throw ConfigError("label_threshold must lie in [0, 1]");
    }
    if (!(reasoning.tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.task.d = 3;
    c.task.n_per_sample = {2000, 2000, 2000};
    c.task.feature_dim = 5;
    c.task.signal_separation = 2.0;
    c.task.truth_positive_rate = 0.3;
    c.task.noise_profiles = {{0.30, 0.00}, {0.00, 0.30}, {0.15, 0.15}};
    c.diversity.instance_threshold = 0.5;
    c.diversity.label_threshold = 0.05;
    c.loss = LossConfig::uniform(BaseLoss::binary_cross_entropy, 2);
    c.optim.learning_rate = 0.5;
    c.optim.epochs = 40;
    c.optim.batch_size = 64;
    c.optim.optimizer = OptimizerKind::gradient_descent;
    c.model.architecture = Architecture::linear;
    c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.test_fraction = 0.2;
    return c;
}

std::string config_to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    try {
        return config_from(json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    return config_from_json(io::read_file(path));
}

std::uint64_t test_split_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
std::uint64_t model_init_seed(std::uint64_t seed) { return derive_seed(seed, 2); }
std::uint64_t shuffle_seed(std::uint64_t seed) { return derive_seed(seed, 3); }

int test_split_size(const ExperimentConfig& config) {
    long long total = 0;
    for (int n : config.task.n_per_sample) total += n;
    const auto size = static_cast<long long>(
        std::llround(config.test_fraction * static_cast<double>(total)));
    return static_cast<int>(std::max(1ll, size));
}

TrainingSet to_training_set(const RearrangedTargets& targets,
                            std::span<const NoisySample> samples) {
    std::unordered_map<std::int64_t, const Instance*> by_id;
    for (const NoisySample& sample : samples) {
        for (const Instance& inst : sample.instances) by_id.emplace(inst.id, &inst);
    }
    TrainingSet set;
    set.targets_per_instance = targets.targets_per_instance;
    set.examples.reserve(targets.instances.size());
    for (const InstanceTargets& entry : targets.instances) {
        auto it = by_id.find(entry.instance_id);
        if (it == by_id.end()) {
            throw DataError("rearranged targets reference unknown instance " +
                            std::to_string(entry.instance_id));
        }
        set.examples.push_back(TrainingExample{it->second->features, entry.targets});
    }
    return set;
}

namespace {

// Tracks which stage a method run is in so failures can name it.
struct StageGuard {
    std::string current = "generate";
};

MethodResult failed(const StageGuard& stage, const std::exception& e) {
    MethodResult r;
    r.ok = false;
    r.failed_stage = stage.current;
    r.error = e.what();
    return r;
}

Metrics evaluate_model(const ModelParams& params, const TestSplit& split) {
    std::vector<std::pair<std::int64_t, double>> predictions;
    predictions.reserve(split.instances.size());
    for (const Instance& inst : split.instances) {
        predictions.emplace_back(inst.id, predict(params, inst.features));
    }
    return evaluate(predictions, split.truth);
}

// Abduction pipeline over a span of samples followed by training; shared by
// the multi-sample method (all samples) and the single-sample baseline.
struct TrainedModel {
    ModelParams params;
    double train_seconds = 0.0;
};

TrainedModel abduce_and_train(std::span<const NoisySample> samples, const KnowledgeBase& kb,
                              const ExperimentConfig& config, std::uint64_t seed,
                              StageGuard& stage) {
    stage.current = "extract_groundings";
    const GroundingSet groundings = extract_groundings(samples, config.grounding);
    stage.current = "estimate_inconsistencies";
    const InconsistencySet inconsistencies =
        estimate_inconsistencies(groundings, kb, config.reasoning);
    stage.current = "abduce_revisions";
    const RevisedGroundingSet revised =
        abduce_revisions(inconsistencies, groundings, kb, config.abduction);
    stage.current = "abduce_targets";
    const TargetSet targets = abduce_targets(revised, samples, kb, config.target);
    stage.current = "rearrange_targets";
    const RearrangedTargets rearranged = rearrange_targets(targets, samples, config.rearrange);
    stage.current = "train";
    const TrainingSet training = to_training_set(rearranged, samples);
    const ModelParams initial =
        init_params(config.model.architecture, config.task.feature_dim,
                    config.model.hidden_width, model_init_seed(seed));
    OptimConfig optim = config.optim;
    optim.seed = shuffle_seed(seed);
    TrainReport report = train(initial, training, config.loss, optim);
    return TrainedModel{std::move(report.final_params), report.wall_time_seconds};
}

} // namespace

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
    SeedResult result;
    result.seed = seed;

    StageGuard stage;
    GeneratedTask task;
    TestSplit split;
    try {
        task = generate_task(config.task, seed);
        split = generate_test_split(config.task, test_split_seed(seed),
                                    test_split_size(config),
                                    static_cast<std::int64_t>(task.total_instances()) + 1);
    } catch (const std::exception& e) {
        result.dns = result.single_best = result.pooled = failed(stage, e);
        return result;
    }
    const KnowledgeBase kb(task.kb_items);

    // Multi-sample method: validate diversity, then the full pipeline.
    try {
        stage.current = "validate_dns";
        const DiverseNoisySamples dns = validate_dns(task.samples, config.diversity);
        TrainedModel model = abduce_and_train(dns.samples(), kb, config, seed, stage);
        stage.current = "evaluate";
        result.dns.metrics = evaluate_model(model.params, split);
        result.dns.train_seconds = model.train_seconds;
        result.dns.ok = true;
    } catch (const std::exception& e) {
        result.dns = failed(stage, e);
    }

    // Baseline: the same pipeline restricted to each single sample, keeping
    // the best-scoring source.
    try {
        MethodResult best;
        double total_seconds = 0.0;
        for (std::size_t d = 0; d < task.samples.size(); ++d) {
            stage.current = "extract_groundings";
            TrainedModel model = abduce_and_train(
                std::span<const NoisySample>(task.samples).subspan(d, 1), kb, config, seed,
                stage);
            stage.current = "evaluate";
            const Metrics metrics = evaluate_model(model.params, split);
            total_seconds += model.train_seconds;
            if (!best.ok || metrics.f1 > best.metrics.f1) {
                best.ok = true;
                best.metrics = metrics;
                best.best_sample = static_cast<int>(d) + 1;
            }
        }
        best.train_seconds = total_seconds;
        result.single_best = best;
    } catch (const std::exception& e) {
        result.single_best = failed(stage, e);
    }

    // Baseline: pooled noisy labels as single targets.
    try {
        stage.current = "train";
        TrainingSet pooled;
        pooled.targets_per_instance = 1;
        for (const NoisySample& sample : task.samples) {
            for (std::size_t i = 0; i < sample.size(); ++i) {
                pooled.examples.push_back(
                    TrainingExample{sample.instances[i].features, {sample.labels[i]}});
            }
        }
        LossConfig single_loss;
        single_loss.base_loss = config.loss.base_loss;
        single_loss.alphas = {1.0};
        const ModelParams initial =
            init_params(config.model.architecture, config.task.feature_dim,
                        config.model.hidden_width, model_init_seed(seed));
        OptimConfig optim = config.optim;
        optim.seed = shuffle_seed(seed);
        TrainReport report = train(initial, pooled, single_loss, optim);
        stage.current = "evaluate";
        result.pooled.metrics = evaluate_model(report.final_params, split);
        result.pooled.train_seconds = report.wall_time_seconds;
        result.pooled.ok = true;
    } catch (const std::exception& e) {
        result.pooled = failed(stage, e);
    }

    return result;
}

ComparisonReport run_pipeline(const ExperimentConfig& config, int jobs) {
    config.validate();
    ComparisonReport report;
    report.config = config;
    report.per_seed.resize(config.seeds.size());

    const int workers = std::clamp(jobs, 1, static_cast<int>(config.seeds.size()));
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= config.seeds.size()) break;
            report.per_seed[i] = run_seed(config, config.seeds[i]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return report;
}

MethodAggregate ComparisonReport::aggregate_dns() const {
    return aggregate_over(per_seed, &SeedResult::dns);
}
MethodAggregate ComparisonReport::aggregate_single() const {
    return aggregate_over(per_seed, &SeedResult::single_best);
}
MethodAggregate ComparisonReport::aggregate_pooled() const {
    return aggregate_over(per_seed, &SeedResult::pooled);
}

std::string report_to_json(const ComparisonReport& report) {
    json root;
    root["config"] = config_json(report.config);
    root["per_seed"] = json::array();
    for (const SeedResult& seed : report.per_seed) {
        json row;
        row["seed"] = seed.seed;
        row[kMethodDns] = cell_json(seed.dns, false);
        row[kMethodSingle] = cell_json(seed.single_best, true);
        row[kMethodPooled] = cell_json(seed.pooled, false);
        root["per_seed"].push_back(std::move(row));
    }
    auto aggregate_json = [](const MethodAggregate& agg) {
        json j;
        j["runs"] = agg.runs;
        j["mean"] = metrics_json(agg.mean);
        j["stddev"] = metrics_json(agg.stddev);
        return j;
    };
    root["aggregates"] = {{kMethodDns, aggregate_json(report.aggregate_dns())},
                          {kMethodSingle, aggregate_json(report.aggregate_single())},
                          {kMethodPooled, aggregate_json(report.aggregate_pooled())}};
    return root.dump(2) + "\n";
}

namespace {

void append_summary_row(std::string& out, const std::string& seed_label,
                        const char* method, const MethodResult& cell) {
    out += seed_label;
    out += ',';
    out += method;
    if (cell.ok) {
        out += ',' + io::format_double(cell.metrics.accuracy);
        out += ',' + io::format_double(cell.metrics.precision);
        out += ',' + io::format_double(cell.metrics.recall);
        out += ',' + io::format_double(cell.metrics.f1);
        out += ',';
        if (cell.best_sample > 0) out += std::to_string(cell.best_sample);
        out += ',';
    } else {
        out += ",,,,,," + cell.failed_stage;
    }
    out += '\n';
}

void append_aggregate_rows(std::string& out, const char* method, const MethodAggregate& agg) {
    out += std::string("mean,") + method + ',' + io::format_double(agg.mean.accuracy) + ',' +
           io::format_double(agg.mean.precision) + ',' + io::format_double(agg.mean.recall) +
           ',' + io::format_double(agg.mean.f1) + ",,\n";
    out += std::string("stddev,") + method + ',' + io::format_double(agg.stddev.accuracy) +
           ',' + io::format_double(agg.stddev.precision) + ',' +
           io::format_double(agg.stddev.recall) + ',' + io::format_double(agg.stddev.f1) +
           ",,\n";
}

} // namespace

std::string report_summary_csv(const ComparisonReport& report) {
    std::string out = "seed,method,accuracy,precision,recall,f1,best_sample,failed_stage\n";
    for (const SeedResult& seed : report.per_seed) {
        const std::string label = std::to_string(seed.seed);
        append_summary_row(out, label, kMethodDns, seed.dns);
        append_summary_row(out, label, kMethodSingle, seed.single_best);
        append_summary_row(out, label, kMethodPooled, seed.pooled);
    }
    append_aggregate_rows(out, kMethodDns, report.aggregate_dns());
    append_aggregate_rows(out, kMethodSingle, report.aggregate_single());
    append_aggregate_rows(out, kMethodPooled, report.aggregate_pooled());
    return out;
}

std::string report_timings_csv(const ComparisonReport& report) {
    std::string out = "seed,method,train_seconds\n";
    for (const SeedResult& seed : report.per_seed) {
        const std::string label = std::to_string(seed.seed);
        out += label + ',' + kMethodDns + ',' + io::format_double(seed.dns.train_seconds) + '\n';
        out += label + ',' + kMethodSingle + ',' +
               io::format_double(seed.single_best.train_seconds) + '\n';
        out += label + ',' + kMethodPooled + ',' + io::format_double(seed.pooled.train_seconds) +
               '\n';
    }
    return out;
}

void write_report_files(const ComparisonReport& report,
                        const std::filesystem::path& out_dir) {
    io::atomic_write(out_dir / "report.json", report_to_json(report));
    io::atomic_write(out_dir / "summary.csv", report_summary_csv(report));
    io::atomic_write(out_dir / "timings.csv", report_timings_csv(report));
}

} // namespace osamtl
