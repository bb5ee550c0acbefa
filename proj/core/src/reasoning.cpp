#include "osamtl/reasoning.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace osamtl {

std::size_t InconsistencySet::count() const {
    std::size_t n = 0;
    for (const auto& list : per_sample) n += list.size();
    return n;
}

InconsistencySet estimate_inconsistencies(const GroundingSet& groundings,
                                          const KnowledgeBase& kb,
                                          const ReasoningParams& params) {
    InconsistencySet result;
    result.per_sample.resize(groundings.per_sample.size());
    for (std::size_t d = 0; d < groundings.per_sample.size(); ++d) {
        for (const Grounding& g : groundings.per_sample[d]) {
            if (g.polarity != Polarity::asserted) continue;
            const KnowledgeItem* item = kb.find(g.predicate);
            if (item == nullptr) {
                ++result.skipped_groundings;
                continue;
            }
            const double below = item->admissible_lo - g.observed_value;
            const double above = g.observed_value - item->admissible_hi;
            const double distance = std::max({0.0, below, above});
            const double magnitude = item->weight * distance;
            if (magnitude <= params.tolerance) continue;
            result.per_sample[d].push_back(Inconsistency{
                .grounding_id = g.id,
                .knowledge_id = item->id,
                .source_sample = g.source_sample,
                .magnitude = magnitude,
            });
            result.total += magnitude;
        }
    }
    return result;
}

std::size_t RevisedGroundingSet::flattened_size() const {
    std::size_t n = 0;
    for (const auto& list : per_sample) n += list.size();
    return n;
}

int RevisedGroundingSet::total_negated() const {
    int n = 0;
    for (const RevisionCounts& c : counts) n += c.negated;
    return n;
}

int RevisedGroundingSet::total_added() const {
    int n = 0;
    for (const RevisionCounts& c : counts) n += c.added;
    return n;
}

GroundingSet RevisedGroundingSet::asserted_subset(const GroundingParams& params) const {
    GroundingSet subset;
    subset.params = params;
    subset.per_sample.resize(per_sample.size());
    for (std::size_t d = 0; d < per_sample.size(); ++d) {
        for (const Grounding& g : per_sample[d]) {
            if (g.polarity == Polarity::asserted) subset.per_sample[d].push_back(g);
        }
    }
    return subset;
}

RevisedGroundingSet abduce_revisions(const InconsistencySet& inconsistencies,
                                     const GroundingSet& groundings,
                                     const KnowledgeBase& kb,
                                     const AbductionParams& /*params*/) {
    if (inconsistencies.per_sample.size() != groundings.per_sample.size()) {
        throw InternalError("inconsistency set does not match the grounding set layout");
    }

    // Violations keyed by grounding id, per sample.
    std::vector<std::unordered_map<int, const Inconsistency*>> violated(
        groundings.per_sample.size());
    for (std::size_t d = 0; d < inconsistencies.per_sample.size(); ++d) {
        for (const Inconsistency& ic : inconsistencies.per_sample[d]) {
            bool known = false;
            for (const Grounding& g : groundings.per_sample[d]) {
                if (g.id == ic.grounding_id) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                throw InternalError("inconsistency references unknown grounding id " +
                                    std::to_string(ic.grounding_id));
            }
            violated[d].emplace(ic.grounding_id, &ic);
        }
    }

    RevisedGroundingSet result;
    result.per_sample.resize(groundings.per_sample.size());
    result.counts.resize(groundings.per_sample.size());
    int next_id = groundings.max_id() + 1;

    for (std::size_t d = 0; d < groundings.per_sample.size(); ++d) {
        std::vector<Grounding> revised;
        std::vector<Grounding> additions;
        revised.reserve(groundings.per_sample[d].size());
        for (const Grounding& g : groundings.per_sample[d]) {
            auto it = violated[d].find(g.id);
            if (it == violated[d].end()) {
                revised.push_back(g);
                ++result.counts[d].kept;
                continue;
            }
            Grounding negated = g;
            negated.polarity = Polarity::negated;
            revised.push_back(negated);
            ++result.counts[d].negated;

            const KnowledgeItem* item = kb.find_by_id(it->second->knowledge_id);
            if (item == nullptr) {
                throw InternalError("inconsistency references unknown knowledge id " +
                                    std::to_string(it->second->knowledge_id));
            }
            Grounding corrective = g;
            corrective.id = next_id++;
            corrective.polarity = Polarity::asserted;
            corrective.observed_value =
                std::clamp(g.observed_value, item->admissible_lo, item->admissible_hi);
            additions.push_back(corrective);
            ++result.counts[d].added;
        }
        revised.insert(revised.end(), additions.begin(), additions.end());
        result.per_sample[d] = std::move(revised);
    }
    return result;
}

} // namespace osamtl
