// Shared fixtures and independent brute-force oracles used across the test
// suites. Everything here recomputes from first principles and must stay
// independent of the library code paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "osamtl/dns.hpp"
#include "osamtl/rng.hpp"

namespace test_helpers {

inline osamtl::NoisySample make_sample(int id, const std::vector<std::int64_t>& ids,
                                       const std::vector<std::vector<double>>& features,
                                       const std::vector<double>& labels) {
    osamtl::NoisySample sample;
    sample.id = id;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        sample.instances.push_back(osamtl::Instance{ids[i], features[i], id});
    }
    sample.labels = labels;
    return sample;
}

// Sample with 1-d features and hard labels; ids count up from id_start.
inline osamtl::NoisySample simple_sample(int id, const std::vector<double>& feature0,
                                         const std::vector<double>& labels,
                                         std::int64_t id_start) {
    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> features;
    for (std::size_t i = 0; i < feature0.size(); ++i) {
        ids.push_back(id_start + static_cast<std::int64_t>(i));
        features.push_back({feature0[i]});
    }
    return make_sample(id, ids, features, labels);
}

inline osamtl::NoisySample random_sample(osamtl::Rng& rng, int id, std::size_t n,
                                         std::size_t dim, std::int64_t id_start) {
    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(id_start + static_cast<std::int64_t>(i));
        std::vector<double> f(dim);
        for (double& v : f) v = rng.uniform(-3.0, 3.0);
        features.push_back(std::move(f));
        labels.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    }
    return make_sample(id, ids, features, labels);
}

// Brute-force oracle for the symmetric mean nearest-neighbor distance.
inline double oracle_symmetric_mean_nn(const osamtl::NoisySample& a,
                                       const osamtl::NoisySample& b) {
    auto one_way = [](const osamtl::NoisySample& from, const osamtl::NoisySample& to) {
        double total = 0.0;
        for (const auto& p : from.instances) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to.instances) {
                double sum = 0.0;
                for (std::size_t k = 0; k < p.features.size(); ++k) {
                    sum += (p.features[k] - q.features[k]) * (p.features[k] - q.features[k]);
                }
                best = std::min(best, std::sqrt(sum));
            }
            total += best;
        }
        return total / static_cast<double>(from.instances.size());
    };
    return 0.5 * (one_way(a, b) + one_way(b, a));
}

} // namespace test_helpers
