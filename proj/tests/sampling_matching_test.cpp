// Copyright 2026 The smmoney Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "smmoney/sampling_matching.hpp"

namespace smmoney {
namespace {

TEST(Classify, SamePortMeansEvenParity) {
    EXPECT_FALSE(classify(DetectorEvent::same_mode(Port::kC, 2)).is_conclusive());
    EXPECT_FALSE(classify(DetectorEvent::same_mode(Port::kD, 1)).is_conclusive());
    const auto even = classify(DetectorEvent::distinct_modes(1, Port::kD, 3, Port::kD));
    ASSERT_TRUE(even.is_conclusive());
    EXPECT_EQ(*even.tuple, (Tuple{1, 3}));
    EXPECT_FALSE(even.parity);
    const auto odd = classify(DetectorEvent::distinct_modes(2, Port::kC, 4, Port::kD));
    EXPECT_TRUE(odd.parity);
}

TEST(SampleIndex, FollowsTheGivenProbabilities) {
    const std::vector<double> probs{0.1, 0.0, 0.6, 0.3};
    Rng rng(9);
    std::vector<int> counts(4, 0);
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) ++counts[sample_index(probs, rng)];
    EXPECT_EQ(counts[1], 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double se = std::sqrt(probs[i] * (1 - probs[i]) / kDraws);
        EXPECT_NEAR(counts[i] / static_cast<double>(kDraws), probs[i], 4 * se + 1e-12);
    }
}

TEST(RunSm, HonestOutcomesAreUniformAndCorrect) {
    constexpr int n = 5;
    constexpr int kRuns = 100000;
    Rng rng(123);
    std::vector<int> per_tuple(tuple_count(n), 0);
    int inconclusive = 0;
    for (int i = 0; i < kRuns; ++i) {
        const auto x = BitString::random(n, rng);
        const auto o = run_sm(encode_note_state(x), rng);
        if (!o.is_conclusive()) {
            ++inconclusive;
            continue;
        }
        ASSERT_EQ(o.parity, x.parity(*o.tuple));
        ++per_tuple[tuple_index(n, *o.tuple)];
    }
    const double p2 = 1.0 / n;
    EXPECT_NEAR(inconclusive / double(kRuns), p2, 4 * std::sqrt(p2 * (1 - p2) / kRuns));
    // Conditional tuple distribution is uniform: chi-square with 9 dof.
    const int conclusive = kRuns - inconclusive;
    const double expected = conclusive / static_cast<double>(per_tuple.size());
    double chi2 = 0.0;
    for (int c : per_tuple) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 33.7);  // 99.99th percentile at 9 dof
}

TEST(RunSm, MixedHolderUsesTheMixedDistribution) {
    constexpr int n = 4;
    Rng rng(55);
    const auto eta = SinglePhotonMixedState::maximally_mixed(n);
    const auto x = BitString::parse("0110");
    int wrong = 0, conclusive = 0;
    constexpr int kRuns = 50000;
    for (int i = 0; i < kRuns; ++i) {
        const auto o = run_sm(eta, rng);
        if (!o.is_conclusive()) continue;
        ++conclusive;
        wrong += o.parity != x.parity(*o.tuple);
    }
    // Maximally mixed input: parity is a fair coin on conclusive outcomes.
    EXPECT_NEAR(wrong / double(conclusive), 0.5, 4 * std::sqrt(0.25 / conclusive));
}

TEST(Conclusive, ProbabilityIsOneMinusOneOverN) {
    EXPECT_DOUBLE_EQ(single_photon_conclusive_probability(4), 0.75);
    EXPECT_DOUBLE_EQ(single_photon_conclusive_probability(2), 0.5);
    EXPECT_THROW(single_photon_conclusive_probability(1), std::invalid_argument);
}

TEST(TupleSetContains, OnlyOrderedPairsInRange) {
    const TupleSet set(4);
    EXPECT_TRUE(set.contains({1, 4}));
    EXPECT_FALSE(set.contains({4, 1}));
    EXPECT_FALSE(set.contains({2, 2}));
    EXPECT_FALSE(set.contains({0, 3}));
    EXPECT_FALSE(set.contains({3, 5}));
}

}  // namespace
}  // namespace smmoney
