#include "osamtl/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace osamtl::io {

namespace {

// Line-oriented whitespace tokenizer that tracks line numbers for errors.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-empty line split into tokens; false at end of input.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_number_;
            tokens.clear();
            std::istringstream stream(line);
            std::string token;
            while (stream >> token) tokens.push_back(token);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("line " + std::to_string(line_number_) + ": " + what);
    }

    int line_number() const { return line_number_; }

private:
    std::istream& in_;
    int line_number_ = 0;
};

long long to_int(const LineReader& reader, const std::string& token) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw DataError("line " + std::to_string(reader.line_number()) +
                        ": expected an integer, got '" + token + "'");
    }
    return value;
}

double to_real(const LineReader& reader, const std::string& token) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw DataError("line " + std::to_string(reader.line_number()) +
                        ": expected a real number, got '" + token + "'");
    }
    return value;
}

} // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError("cannot parse real number from '" + std::string(text) + "'");
    }
    return value;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename " + tmp.string() + " to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

namespace {

template <typename Writer>
void write_via(const std::filesystem::path& path, Writer&& writer) {
    std::ostringstream out;
    writer(out);
    atomic_write(path, out.str());
}

template <typename Reader>
auto read_via(const std::filesystem::path& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return reader(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

} // namespace

void write_dataset(std::ostream& out, std::span<const NoisySample> samples) {
    for (const NoisySample& sample : samples) {
        const std::size_t dim =
            sample.instances.empty() ? 0 : sample.instances.front().features.size();
        out << sample.id << ' ' << sample.size() << ' ' << dim << '\n';
        for (std::size_t i = 0; i < sample.size(); ++i) {
            out << sample.instances[i].id;
            for (double f : sample.instances[i].features) out << ' ' << format_double(f);
            out << ' ' << format_double(sample.labels[i]) << '\n';
        }
    }
}

std::vector<NoisySample> read_dataset(std::istream& in) {
    LineReader reader(in);
    std::vector<NoisySample> samples;
    std::vector<std::string> tokens;
    while (reader.next(tokens)) {
        if (tokens.size() != 3) reader.fail("expected sample header 'sample_id n feature_dim'");
        NoisySample sample;
        sample.id = static_cast<int>(to_int(reader, tokens[0]));
        const long long n = to_int(reader, tokens[1]);
        const long long dim = to_int(reader, tokens[2]);
        if (n < 1) reader.fail("sample must contain at least one instance");
        if (dim < 0) reader.fail("negative feature dimension");
        sample.instances.reserve(static_cast<std::size_t>(n));
        sample.labels.reserve(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) {
            if (!reader.next(tokens)) reader.fail("unexpected end of sample block");
            if (tokens.size() != static_cast<std::size_t>(dim) + 2) {
                reader.fail("expected 'instance_id " + std::to_string(dim) +
                            " features label'");
            }
            Instance inst;
            inst.id = to_int(reader, tokens[0]);
            inst.sample_index = sample.id;
            inst.features.reserve(static_cast<std::size_t>(dim));
            for (long long k = 0; k < dim; ++k) {
                inst.features.push_back(to_real(reader, tokens[static_cast<std::size_t>(k) + 1]));
            }
            sample.labels.push_back(to_real(reader, tokens.back()));
            sample.instances.push_back(std::move(inst));
        }
        samples.push_back(std::move(sample));
    }
    if (samples.empty()) throw DataError("dataset contains no samples");
    return samples;
}

void write_knowledge(std::ostream& out, const std::vector<KnowledgeItem>& items) {
    for (const KnowledgeItem& item : items) {
        out << to_string(item.predicate) << ' ' << format_double(item.admissible_lo) << ' '
            << format_double(item.admissible_hi) << ' ' << format_double(item.weight) << '\n';
    }
}

std::vector<KnowledgeItem> read_knowledge(std::istream& in) {
    LineReader reader(in);
    std::vector<KnowledgeItem> items;
    std::vector<std::string> tokens;
    int next_id = 1;
    while (reader.next(tokens)) {
        if (tokens.size() != 4) reader.fail("expected 'predicate lo hi weight'");
        const auto predicate = predicate_from_string(tokens[0]);
        if (!predicate) reader.fail("unknown predicate '" + tokens[0] + "'");
        items.push_back(KnowledgeItem{.id = next_id++,
                                      .predicate = *predicate,
                                      .admissible_lo = to_real(reader, tokens[1]),
                                      .admissible_hi = to_real(reader, tokens[2]),
                                      .weight = to_real(reader, tokens[3])});
    }
    if (items.empty()) throw DataError("knowledge file contains no items");
    return items;
}

void write_revision_report(std::ostream& out, const RevisedGroundingSet& revised,
                           const InconsistencySet& inconsistencies) {
    out << revised.per_sample.size() << ' '
        << revised.flattened_size() - static_cast<std::size_t>(revised.total_negated()) -
               static_cast<std::size_t>(revised.total_added())
        << ' ' << revised.total_negated() << ' ' << revised.total_added() << '\n';
    for (std::size_t d = 0; d < revised.per_sample.size(); ++d) {
        // Magnitudes keyed by the grounding that was judged.
        std::map<int, double> magnitude;
        if (d < inconsistencies.per_sample.size()) {
            for (const Inconsistency& ic : inconsistencies.per_sample[d]) {
                magnitude[ic.grounding_id] = ic.magnitude;
            }
        }
        std::size_t originals = revised.per_sample[d].size() -
                                static_cast<std::size_t>(revised.counts[d].added);
        for (std::size_t i = 0; i < revised.per_sample[d].size(); ++i) {
            const Grounding& g = revised.per_sample[d][i];
            const char* status = i >= originals               ? "added"
                                 : g.polarity == Polarity::negated ? "negated"
                                                                   : "kept";
            auto it = magnitude.find(g.id);
            const double mag = it == magnitude.end() ? 0.0 : it->second;
            out << g.source_sample << ' ' << g.id << ' ' << to_string(g.predicate) << ' '
                << format_double(g.observed_value) << ' ' << status << ' '
                << format_double(mag) << '\n';
        }
    }
}

void write_targets(std::ostream& out, const RearrangedTargets& targets) {
    out << targets.instances.size() << ' ' << targets.targets_per_instance << '\n';
    for (const InstanceTargets& entry : targets.instances) {
        out << entry.instance_id << ' ' << entry.sample_index;
        for (double t : entry.targets) out << ' ' << format_double(t);
        out << '\n';
    }
}

RearrangedTargets read_targets(std::istream& in) {
    LineReader reader(in);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens.size() != 2) {
        throw DataError("target dump must start with a 'n p' header");
    }
    const long long n = to_int(reader, tokens[0]);
    const long long p = to_int(reader, tokens[1]);
    if (n < 1 || p < 1) throw DataError("target dump header out of range");
    RearrangedTargets result;
    result.targets_per_instance = static_cast<int>(p);
    result.instances.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        if (!reader.next(tokens)) reader.fail("unexpected end of target dump");
        if (tokens.size() != static_cast<std::size_t>(p) + 2) {
            reader.fail("expected 'instance_id sample_index " + std::to_string(p) + " targets'");
        }
        InstanceTargets entry;
        entry.instance_id = to_int(reader, tokens[0]);
        entry.sample_index = static_cast<int>(to_int(reader, tokens[1]));
        entry.targets.reserve(static_cast<std::size_t>(p));
        for (long long c = 0; c < p; ++c) {
            entry.targets.push_back(to_real(reader, tokens[static_cast<std::size_t>(c) + 2]));
        }
        result.instances.push_back(std::move(entry));
    }
    return result;
}

void write_checkpoint(std::ostream& out, const ModelParams& params) {
    if (params.architecture == Architecture::linear) {
        out << "linear " << params.input_dim << '\n';
    } else {
        out << "one_hidden " << params.input_dim << ' ' << params.hidden_width << '\n';
    }
    for (double v : params.values) out << format_double(v) << '\n';
}

ModelParams read_checkpoint(std::istream& in) {
    LineReader reader(in);
    std::vector<std::string> tokens;
    if (!reader.next(tokens)) throw DataError("checkpoint is empty");
    ModelParams params;
    if (tokens[0] == "linear" && tokens.size() == 2) {
        params = ModelParams::linear(static_cast<int>(to_int(reader, tokens[1])));
    } else if (tokens[0] == "one_hidden" && tokens.size() == 3) {
        params = ModelParams::one_hidden(static_cast<int>(to_int(reader, tokens[1])),
                                         static_cast<int>(to_int(reader, tokens[2])));
    } else {
        reader.fail("expected 'linear dim' or 'one_hidden dim width'");
    }
    for (double& v : params.values) {
        if (!reader.next(tokens) || tokens.size() != 1) {
            reader.fail("expected one parameter value per line");
        }
        v = to_real(reader, tokens[0]);
    }
    return params;
}

void write_id_values(std::ostream& out, const IdValueRows& rows) {
    for (const auto& [id, value] : rows) {
        out << id << ' ' << format_double(value) << '\n';
    }
}

IdValueRows read_id_values(std::istream& in) {
    LineReader reader(in);
    IdValueRows rows;
    std::vector<std::string> tokens;
    while (reader.next(tokens)) {
        if (tokens.size() != 2) reader.fail("expected 'instance_id value'");
        rows.emplace_back(to_int(reader, tokens[0]), to_real(reader, tokens[1]));
    }
    if (rows.empty()) throw DataError("file contains no rows");
    return rows;
}

std::map<std::int64_t, int> read_truth_file(const std::filesystem::path& path) {
    std::map<std::int64_t, int> truth;
    for (const auto& [id, value] : read_id_values_file(path)) {
        truth[id] = value >= 0.5 ? 1 : 0;
    }
    return truth;
}

void write_truth_file(const std::filesystem::path& path,
                      const std::map<std::int64_t, int>& truth) {
    IdValueRows rows;
    rows.reserve(truth.size());
    for (const auto& [id, value] : truth) rows.emplace_back(id, static_cast<double>(value));
    write_id_values_file(path, rows);
}

void write_dataset_file(const std::filesystem::path& path, std::span<const NoisySample> samples) {
    write_via(path, [&](std::ostream& out) { write_dataset(out, samples); });
}
std::vector<NoisySample> read_dataset_file(const std::filesystem::path& path) {
    return read_via(path, [](std::istream& in) { return read_dataset(in); });
}
void write_knowledge_file(const std::filesystem::path& path,
                          const std::vector<KnowledgeItem>& items) {
    write_via(path, [&](std::ostream& out) { write_knowledge(out, items); });
}
std::vector<KnowledgeItem> read_knowledge_file(const std::filesystem::path& path) {
    return read_via(path, [](std::istream& in) { return read_knowledge(in); });
}
void write_revision_report_file(const std::filesystem::path& path,
                                const RevisedGroundingSet& revised,
                                const InconsistencySet& inconsistencies) {
    write_via(path,
              [&](std::ostream& out) { write_revision_report(out, revised, inconsistencies); });
}
void write_targets_file(const std::filesystem::path& path, const RearrangedTargets& targets) {
    write_via(path, [&](std::ostream& out) { write_targets(out, targets); });
}
RearrangedTargets read_targets_file(const std::filesystem::path& path) {
    return read_via(path, [](std::istream& in) { return read_targets(in); });
}
void write_checkpoint_file(const std::filesystem::path& path, const ModelParams& params) {
    write_via(path, [&](std::ostream& out) { write_checkpoint(out, params); });
}
ModelParams read_checkpoint_file(const std::filesystem::path& path) {
    return read_via(path, [](std::istream& in) { return read_checkpoint(in); });
}
void write_id_values_file(const std::filesystem::path& path, const IdValueRows& rows) {
    write_via(path, [&](std::ostream& out) { write_id_values(out, rows); });
}
IdValueRows read_id_values_file(const std::filesystem::path& path) {
    return read_via(path, [](std::istream& in) { return read_id_values(in); });
}

} // namespace osamtl::io
