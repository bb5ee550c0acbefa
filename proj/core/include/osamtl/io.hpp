// On-disk formats for every pipeline artifact. All reals are serialized with
// shortest-round-trip formatting so a re-read value is bit-identical, and all
// file writes go through a write-temp-then-rename helper.
//
// dataset:     per sample a header "sample_id n feature_dim" followed by n
//              rows "instance_id f_1 ... f_k label"
// knowledge:   rows "predicate lo hi weight"
// revisions:   header "samples kept negated added", then rows
//              "sample_id grounding_id predicate value status magnitude"
// target dump: header "n p", then rows "instance_id sample_index t_1 ... t_p"
// checkpoint:  "linear dim" or "one_hidden dim width", then one parameter
//              value per line in declared order
// predictions / truth: rows "instance_id value"
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "osamtl/dns.hpp"
#include "osamtl/knowledge.hpp"
#include "osamtl/learner.hpp"
#include "osamtl/reasoning.hpp"
#include "osamtl/targets.hpp"

namespace osamtl::io {

// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text); // throws DataError

// Writes to a temporary file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path); // throws DataError

void write_dataset(std::ostream& out, std::span<const NoisySample> samples);
std::vector<NoisySample> read_dataset(std::istream& in);
void write_dataset_file(const std::filesystem::path& path, std::span<const NoisySample> samples);
std::vector<NoisySample> read_dataset_file(const std::filesystem::path& path);

void write_knowledge(std::ostream& out, const std::vector<KnowledgeItem>& items);
std::vector<KnowledgeItem> read_knowledge(std::istream& in);
void write_knowledge_file(const std::filesystem::path& path,
                          const std::vector<KnowledgeItem>& items);
std::vector<KnowledgeItem> read_knowledge_file(const std::filesystem::path& path);

// Kept / negated / added groundings with the violation magnitudes that drove
// the revision.
void write_revision_report(std::ostream& out, const RevisedGroundingSet& revised,
                           const InconsistencySet& inconsistencies);
void write_revision_report_file(const std::filesystem::path& path,
                                const RevisedGroundingSet& revised,
                                const InconsistencySet& inconsistencies);

void write_targets(std::ostream& out, const RearrangedTargets& targets);
RearrangedTargets read_targets(std::istream& in);
void write_targets_file(const std::filesystem::path& path, const RearrangedTargets& targets);
RearrangedTargets read_targets_file(const std::filesystem::path& path);

void write_checkpoint(std::ostream& out, const ModelParams& params);
ModelParams read_checkpoint(std::istream& in);
void write_checkpoint_file(const std::filesystem::path& path, const ModelParams& params);
ModelParams read_checkpoint_file(const std::filesystem::path& path);

using IdValueRows = std::vector<std::pair<std::int64_t, double>>;
void write_id_values(std::ostream& out, const IdValueRows& rows);
IdValueRows read_id_values(std::istream& in);
void write_id_values_file(const std::filesystem::path& path, const IdValueRows& rows);
IdValueRows read_id_values_file(const std::filesystem::path& path);

std::map<std::int64_t, int> read_truth_file(const std::filesystem::path& path);
void write_truth_file(const std::filesystem::path& path,
                      const std::map<std::int64_t, int>& truth);

} // namespace osamtl::io
