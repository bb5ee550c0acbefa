#include <doctest.h>

#include "osamtl/reasoning.hpp"
#include "test_helpers.hpp"

using namespace osamtl;
using test_helpers::random_sample;

namespace {

KnowledgeBase rate_kb(double lo, double hi, double weight) {
    return KnowledgeBase({KnowledgeItem{.id = 1,
                                        .predicate = Predicate::positive_rate,
                                        .admissible_lo = lo,
                                        .admissible_hi = hi,
                                        .weight = weight}});
}

GroundingSet single_grounding(double value) {
    GroundingSet g;
    g.params.enabled = {Predicate::positive_rate};
    g.per_sample.push_back({Grounding{.id = 1,
                                      .source_sample = 1,
                                      .predicate = Predicate::positive_rate,
                                      .observed_value = value,
                                      .polarity = Polarity::asserted}});
    return g;
}

// Random grounding sets paired with a knowledge base covering all
// predicates, for the repair property checks.
struct RandomFixture {
    GroundingSet groundings;
    KnowledgeBase kb;
};

RandomFixture random_fixture(Rng& rng) {
    std::vector<KnowledgeItem> items;
    int id = 1;
    for (Predicate predicate : kAllPredicates) {
        const double lo = rng.uniform(0.0, 0.5);
        items.push_back(KnowledgeItem{.id = id++,
                                      .predicate = predicate,
                                      .admissible_lo = lo,
                                      .admissible_hi = lo + rng.uniform(0.0, 0.5),
                                      .weight = rng.uniform(0.1, 3.0)});
    }
    GroundingSet g;
    g.params.enabled = {kAllPredicates.begin(), kAllPredicates.end()};
    const std::size_t d = 1 + rng.index(5);
    int gid = 1;
    for (std::size_t o = 0; o < d; ++o) {
        std::vector<Grounding> list;
        for (Predicate predicate : kAllPredicates) {
            list.push_back(Grounding{.id = gid++,
                                     .source_sample = static_cast<int>(o) + 1,
                                     .predicate = predicate,
                                     .observed_value = rng.uniform(-0.5, 1.5),
                                     .polarity = Polarity::asserted});
        }
        g.per_sample.push_back(std::move(list));
    }
    return RandomFixture{std::move(g), KnowledgeBase(std::move(items))};
}

} // namespace

TEST_SUITE("reasoning") {

TEST_CASE("values inside the admissible interval raise nothing") {
    const auto ic = estimate_inconsistencies(single_grounding(0.25), rate_kb(0.1, 0.4, 1.0),
                                             ReasoningParams{});
    CHECK(ic.count() == 0);
    CHECK(ic.total == 0.0);
}

TEST_CASE("violation above the interval") {
    const auto ic = estimate_inconsistencies(single_grounding(0.9), rate_kb(0.1, 0.4, 1.0),
                                             ReasoningParams{});
    REQUIRE(ic.count() == 1);
    CHECK(ic.per_sample[0][0].magnitude == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ic.per_sample[0][0].grounding_id == 1);
    CHECK(ic.per_sample[0][0].knowledge_id == 1);
}

TEST_CASE("weighted violation below the interval") {
    const auto ic = estimate_inconsistencies(single_grounding(0.02), rate_kb(0.1, 0.4, 2.0),
                                             ReasoningParams{});
    REQUIRE(ic.count() == 1);
    // Independent recomputation of w * (lo - v).
    const double expected = 2.0 * (0.1 - 0.02);
    CHECK(ic.per_sample[0][0].magnitude == expected);
    CHECK(ic.per_sample[0][0].magnitude == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(ic.total == expected);
}

TEST_CASE("groundings without a knowledge item are skipped and counted") {
    GroundingSet g = single_grounding(0.9);
    g.per_sample[0].push_back(Grounding{.id = 2,
                                        .source_sample = 1,
                                        .predicate = Predicate::boundary_density,
                                        .observed_value = 5.0,
                                        .polarity = Polarity::asserted});
    const auto ic = estimate_inconsistencies(g, rate_kb(0.1, 0.4, 1.0), ReasoningParams{});
    CHECK(ic.count() == 1);
    CHECK(ic.skipped_groundings == 1);
}

TEST_CASE("zero inconsistencies leave the groundings unchanged") {
    const GroundingSet g = single_grounding(0.25);
    const KnowledgeBase kb = rate_kb(0.1, 0.4, 1.0);
    const auto ic = estimate_inconsistencies(g, kb, ReasoningParams{});
    const auto revised = abduce_revisions(ic, g, kb, AbductionParams{});
    CHECK(revised.flattened_size() == 1);
    CHECK(revised.counts[0].kept == 1);
    CHECK(revised.counts[0].negated == 0);
    CHECK(revised.counts[0].added == 0);
    CHECK(revised.per_sample[0][0].polarity == Polarity::asserted);
    CHECK(revised.per_sample[0][0].observed_value == 0.25);
}

TEST_CASE("one violation is negated and repaired by clamping") {
    const GroundingSet g = single_grounding(0.9);
    const KnowledgeBase kb = rate_kb(0.1, 0.4, 1.0);
    const auto ic = estimate_inconsistencies(g, kb, ReasoningParams{});
    const auto revised = abduce_revisions(ic, g, kb, AbductionParams{});
    REQUIRE(revised.per_sample[0].size() == 2); // s = r + 1
    CHECK(revised.per_sample[0][0].polarity == Polarity::negated);
    CHECK(revised.per_sample[0][0].observed_value == 0.9);
    const Grounding& corrective = revised.per_sample[0][1];
    CHECK(corrective.polarity == Polarity::asserted);
    CHECK(corrective.observed_value == 0.4);
    CHECK(corrective.predicate == Predicate::positive_rate);
    CHECK(corrective.source_sample == 1);
    CHECK(corrective.id == 2); // fresh id after the original
}

TEST_CASE("violations across samples produce matching addition counts") {
    // 3 samples, rate groundings {0.9, 0.25, 0.02} and a second predicate
    // {0.05, 0.9, 0.9} against [0.1, 0.4]: violations per sample 2, 1, 2.
    // Use intervals so the counts come out {1, 0, 2} for the rate item only.
    GroundingSet g;
    g.params.enabled = {Predicate::positive_rate, Predicate::boundary_density};
    const double rate_values[3] = {0.9, 0.25, 0.02};
    const double boundary_values[3] = {0.2, 0.3, 0.9};
    int id = 1;
    for (int o = 0; o < 3; ++o) {
        g.per_sample.push_back(
            {Grounding{.id = id++,
                       .source_sample = o + 1,
                       .predicate = Predicate::positive_rate,
                       .observed_value = rate_values[o]},
             Grounding{.id = id++,
                       .source_sample = o + 1,
                       .predicate = Predicate::boundary_density,
                       .observed_value = boundary_values[o]}});
    }
    const KnowledgeBase kb({KnowledgeItem{.id = 1,
                                          .predicate = Predicate::positive_rate,
                                          .admissible_lo = 0.1,
                                          .admissible_hi = 0.4,
                                          .weight = 1.0},
                            KnowledgeItem{.id = 2,
                                          .predicate = Predicate::boundary_density,
                                          .admissible_lo = 0.0,
                                          .admissible_hi = 0.5,
                                          .weight = 1.0}});
    const auto ic = estimate_inconsistencies(g, kb, ReasoningParams{});
    const auto revised = abduce_revisions(ic, g, kb, AbductionParams{});

    // Brute-force enumeration of violations per sample.
    int expected_added[3] = {0, 0, 0};
    for (int o = 0; o < 3; ++o) {
        if (rate_values[o] < 0.1 || rate_values[o] > 0.4) ++expected_added[o];
        if (boundary_values[o] < 0.0 || boundary_values[o] > 0.5) ++expected_added[o];
    }
    std::size_t expected_size = 0;
    for (int o = 0; o < 3; ++o) {
        CHECK(revised.counts[o].added == expected_added[o]);
        CHECK(revised.counts[o].negated == expected_added[o]);
        expected_size += 2 + static_cast<std::size_t>(expected_added[o]);
    }
    CHECK(revised.flattened_size() == expected_size);
}

TEST_CASE("repair makes the asserted subset fully consistent") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        RandomFixture fixture = random_fixture(rng);
        const ReasoningParams params;
        const auto ic = estimate_inconsistencies(fixture.groundings, fixture.kb, params);
        const auto revised = abduce_revisions(ic, fixture.groundings, fixture.kb,
                                              AbductionParams{});
        // Monotone repair, exact zero with the clamp rule.
        const auto after = estimate_inconsistencies(
            revised.asserted_subset(fixture.groundings.params), fixture.kb, params);
        CHECK(after.total <= ic.total);
        CHECK(after.total == 0.0);
        CHECK(after.count() == 0);
        // Pairing and size law.
        CHECK(revised.total_negated() == revised.total_added());
        std::size_t expected = 0;
        for (std::size_t o = 0; o < fixture.groundings.per_sample.size(); ++o) {
            expected += fixture.groundings.per_sample[o].size() +
                        static_cast<std::size_t>(revised.counts[o].added);
        }
        CHECK(revised.flattened_size() == expected);
    }
}

TEST_CASE("abduction is idempotent on repaired values") {
    Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        RandomFixture fixture = random_fixture(rng);
        const ReasoningParams params;
        const auto ic = estimate_inconsistencies(fixture.groundings, fixture.kb, params);
        const auto revised = abduce_revisions(ic, fixture.groundings, fixture.kb,
                                              AbductionParams{});
        // Re-feed the asserted (repaired) groundings as a fresh extraction.
        const GroundingSet repaired = revised.asserted_subset(fixture.groundings.params);
        const auto ic2 = estimate_inconsistencies(repaired, fixture.kb, params);
        const auto revised2 = abduce_revisions(ic2, repaired, fixture.kb, AbductionParams{});
        CHECK(revised2.total_negated() == 0);
        CHECK(revised2.total_added() == 0);
        CHECK(revised2.flattened_size() == repaired.total_count());
    }
}

TEST_CASE("an inconsistency naming an unknown grounding is an internal error") {
    const GroundingSet g = single_grounding(0.9);
    const KnowledgeBase kb = rate_kb(0.1, 0.4, 1.0);
    InconsistencySet ic;
    ic.per_sample.push_back({Inconsistency{.grounding_id = 77, .knowledge_id = 1,
                                           .source_sample = 1, .magnitude = 0.5}});
    CHECK_THROWS_AS(abduce_revisions(ic, g, kb, AbductionParams{}), InternalError);
}

TEST_CASE("tolerance suppresses negligible magnitudes") {
    ReasoningParams params;
    params.tolerance = 1e-3;
    const auto ic =
        estimate_inconsistencies(single_grounding(0.4005), rate_kb(0.1, 0.4, 1.0), params);
    CHECK(ic.count() == 0);
}

} // TEST_SUITE
