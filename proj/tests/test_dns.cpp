#include <doctest.h>

#include "osamtl/dns.hpp"
#include "test_helpers.hpp"

using namespace osamtl;
using test_helpers::make_sample;
using test_helpers::oracle_symmetric_mean_nn;
using test_helpers::random_sample;
using test_helpers::simple_sample;

TEST_SUITE("dns") {

TEST_CASE("identical samples are not instance-different") {
    const NoisySample a = simple_sample(1, {0.1, 0.2, 0.3}, {1, 0, 1}, 1);
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.1};
    CHECK(differentiate_instances(a, a, params) == 0);
    CHECK(differentiate_labels(a, a, params) == 0);
    CHECK(diversity(a, a, params) == 0);
}

TEST_CASE("disjoint instance id sets differ") {
    const NoisySample a = simple_sample(1, {0.1, 0.2}, {1, 0}, 1);
    const NoisySample b = simple_sample(2, {0.1, 0.2}, {1, 0}, 100);
    const DiversityParams params{.instance_threshold = 10.0, .label_threshold = 0.1};
    CHECK(differentiate_instances(a, b, params) == 1);
}

TEST_CASE("same ids with features perturbed beyond the threshold differ") {
    const double threshold = 0.25;
    Rng rng(7);
    // Shift every instance by 2 * threshold along an otherwise unused axis,
    // so each instance's nearest neighbor is its own counterpart at exactly
    // that distance.
    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> features_a, features_b;
    for (int i = 0; i < 8; ++i) {
        ids.push_back(i + 1);
        const double v = rng.uniform(-1.0, 1.0);
        features_a.push_back({v, 0.0});
        features_b.push_back({v, 2.0 * threshold});
    }
    const std::vector<double> labels(8, 0.0);
    const NoisySample a = make_sample(1, ids, features_a, labels);
    const NoisySample b = make_sample(2, ids, features_b, labels);

    // Oracle: brute-force the symmetric mean nearest-neighbor distance and
    // check the thresholding decision against it.
    const double distance = oracle_symmetric_mean_nn(a, b);
    CHECK(symmetric_mean_nn_distance(a, b) == doctest::Approx(distance).epsilon(1e-12));
    const DiversityParams params{.instance_threshold = threshold, .label_threshold = 0.1};
    CHECK(distance == doctest::Approx(2.0 * threshold).epsilon(1e-9));
    CHECK(differentiate_instances(a, b, params) == 1);
}

TEST_CASE("dimension mismatch is rejected") {
    const NoisySample a = simple_sample(1, {0.0}, {1}, 1);
    NoisySample b = make_sample(2, {5}, {{0.0, 1.0}}, {1});
    const DiversityParams params;
    CHECK_THROWS_AS(differentiate_instances(a, b, params), DataError);
}

TEST_CASE("identical labels on identical ids do not differ") {
    const NoisySample a = simple_sample(1, {0.1, 0.9, -0.4}, {1, 1, 0}, 1);
    NoisySample b = a;
    b.id = 2;
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.1};
    CHECK(differentiate_labels(a, b, params) == 0);
}

TEST_CASE("positive rate gap beyond the threshold differs") {
    // rates 0.1 vs 0.6, threshold 0.2
    std::vector<double> labels_a(10, 0.0), labels_b(10, 0.0);
    labels_a[0] = 1.0;
    for (int i = 0; i < 6; ++i) labels_b[static_cast<std::size_t>(i)] = 1.0;
    const NoisySample a = simple_sample(1, std::vector<double>(10, 0.0), labels_a, 1);
    const NoisySample b = simple_sample(2, std::vector<double>(10, 0.0), labels_b, 100);
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.2};
    CHECK(differentiate_labels(a, b, params) == 1);
}

TEST_CASE("shared-id disagreement beyond the threshold differs") {
    // Equal positive rates, but 3 of 10 shared ids disagree.
    const std::vector<double> labels_a = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const std::vector<double> labels_b = {0, 1, 1, 1, 0, 0, 0, 0, 1, 0};
    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        if (labels_a[i] != labels_b[i]) ++disagreements;
    }
    CHECK(disagreements == 3); // enumeration oracle
    const NoisySample a = simple_sample(1, std::vector<double>(10, 0.0), labels_a, 1);
    const NoisySample b = simple_sample(2, std::vector<double>(10, 0.0), labels_b, 1);
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.2};
    CHECK(std::abs(a.positive_rate() - b.positive_rate()) <= 0.2);
    CHECK(differentiate_labels(a, b, params) == 1);
}

TEST_CASE("diversity is the product of the two differentiate results") {
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.1};

    SUBCASE("identical samples") {
        const NoisySample a = simple_sample(1, {0.0, 1.0}, {1, 0}, 1);
        CHECK(diversity(a, a, params) == 0);
    }
    SUBCASE("same instances, different labels") {
        const NoisySample a = simple_sample(1, {0.0, 1.0, 2.0, 3.0}, {0, 0, 0, 0}, 1);
        const NoisySample b = simple_sample(2, {0.0, 1.0, 2.0, 3.0}, {1, 1, 1, 1}, 1);
        CHECK(differentiate_labels(a, b, params) == 1);
        CHECK(diversity(a, b, params) == 0);
    }
    SUBCASE("disjoint instances and different rates") {
        const NoisySample a = simple_sample(1, {0.0, 1.0}, {0, 0}, 1);
        const NoisySample b = simple_sample(2, {5.0, 6.0}, {1, 1}, 100);
        CHECK(diversity(a, b, params) == 1);
    }
}

TEST_CASE("diversity properties over random pairs") {
    Rng rng(42);
    const DiversityParams params{.instance_threshold = 1.0, .label_threshold = 0.15};
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n_a = 2 + rng.index(8);
        const std::size_t n_b = 2 + rng.index(8);
        // Overlapping id ranges so shared-id paths get exercised.
        const NoisySample a = random_sample(rng, 1, n_a, 2, 1);
        const NoisySample b =
            random_sample(rng, 2, n_b, 2, static_cast<std::int64_t>(1 + rng.index(n_a + 2)));
        CHECK(diversity(a, b, params) == diversity(b, a, params));
        CHECK(diversity(a, a, params) == 0);
        CHECK(diversity(b, b, params) == 0);
        CHECK(diversity(a, b, params) ==
              differentiate_instances(a, b, params) * differentiate_labels(a, b, params));
    }
}

TEST_CASE("validate_dns accepts pairwise-diverse collections") {
    std::vector<NoisySample> samples;
    const std::vector<double> rates = {0.1, 0.4, 0.8};
    for (int d = 0; d < 3; ++d) {
        std::vector<double> labels(10, 0.0);
        for (int i = 0; i < static_cast<int>(rates[static_cast<std::size_t>(d)] * 10); ++i) {
            labels[static_cast<std::size_t>(i)] = 1.0;
        }
        samples.push_back(
            simple_sample(d + 1, std::vector<double>(10, 0.0), labels, 1 + 100 * d));
    }
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.2};
    const DiverseNoisySamples dns = validate_dns(samples, params);
    CHECK(dns.count() == 3);
    CHECK(dns.total_instances() == 30);
}

TEST_CASE("validate_dns rejects duplicated samples naming the pair") {
    const NoisySample a = simple_sample(1, {0.0, 1.0}, {1, 0}, 1);
    NoisySample b = simple_sample(2, {5.0, 6.0}, {1, 1}, 100);
    NoisySample duplicate = a;
    duplicate.id = 3;
    const DiversityParams params{.instance_threshold = 0.5, .label_threshold = 0.1};
    try {
        validate_dns({a, b, duplicate}, params);
        FAIL("expected a diversity violation");
    } catch (const DiversityError& e) {
        REQUIRE(e.violating_pairs.size() == 1);
        CHECK(e.violating_pairs[0] == std::pair<int, int>{1, 3});
    }
}

TEST_CASE("validate_dns needs at least two samples") {
    const NoisySample a = simple_sample(1, {0.0}, {1}, 1);
    CHECK_THROWS_AS(validate_dns({a}, DiversityParams{}), ConstraintError);
    CHECK_THROWS_AS(validate_dns({}, DiversityParams{}), ConstraintError);
}

TEST_CASE("validate_dns agrees with the brute-force pairwise oracle") {
    Rng rng(99);
    const DiversityParams params{.instance_threshold = 1.0, .label_threshold = 0.15};
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 2 + rng.index(4);
        std::vector<NoisySample> samples;
        std::int64_t id_cursor = 1;
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t n = 2 + rng.index(6);
            // Half the time reuse an id range to provoke violations.
            const std::int64_t start = rng.bernoulli(0.5) ? 1 : id_cursor;
            samples.push_back(
                random_sample(rng, static_cast<int>(k) + 1, n, 2, start));
            id_cursor += static_cast<std::int64_t>(n);
        }
        bool oracle_ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                if (diversity(samples[i], samples[j], params) != 1) oracle_ok = false;
            }
        }
        if (oracle_ok) {
            CHECK_NOTHROW(validate_dns(samples, params));
        } else {
            CHECK_THROWS_AS(validate_dns(samples, params), DiversityError);
        }
    }
}

TEST_CASE("empty and mismatched samples are rejected") {
    NoisySample empty;
    empty.id = 1;
    CHECK_THROWS_AS(empty.validate(), DataError);
    NoisySample mismatched = simple_sample(2, {0.0, 1.0}, {1, 0}, 1);
    mismatched.labels.pop_back();
    CHECK_THROWS_AS(mismatched.validate(), DataError);
}

} // TEST_SUITE
