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

#include "smmoney/coherent.hpp"

namespace smmoney {
namespace {

double se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

/// Independent oracle: enumerate all 2^n click patterns of an honest copy.
double inconclusive_by_enumeration(int n) {
    const double p1 = 1.0 - std::exp(-2.0 / n);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        const int clicks = __builtin_popcount(mask);
        if (clicks < 2) total += std::pow(p1, clicks) * std::pow(1.0 - p1, n - clicks);
    }
    return total;
}

TEST(Encoding, PulsesCarryTheSigns) {
    const auto zero = encode_coherent(BitString::parse("0000"));
    for (const auto& a : zero.pulses) EXPECT_NEAR(a.real(), 0.5, 1e-15);
    const auto mixed = encode_coherent(BitString::parse("0101"));
    const double expected[] = {0.5, -0.5, 0.5, -0.5};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(mixed.pulses[k].real(), expected[k], 1e-15);
    Rng rng(1);
    for (int n = 2; n <= 16; ++n) {
        EXPECT_NEAR(encode_coherent(BitString::random(n, rng)).mean_photon_number(), 1.0, 1e-12);
    }
}

TEST(ClickProbability, HonestStep) {
    EXPECT_NEAR(honest_click_probability(4), 0.3935, 1e-4);
    EXPECT_NEAR(honest_click_probability(4), 1.0 - std::exp(-0.5), 1e-15);
}

TEST(PNot11, MatchesEnumerationAndLimits) {
    for (int n = 2; n <= 16; ++n) EXPECT_NEAR(p_not11(n), inconclusive_by_enumeration(n), 1e-12);
    EXPECT_NEAR(p_not11(4), 0.4865, 1e-4);
    EXPECT_NEAR(p_not11(100000), 3.0 * std::exp(-2.0), 1e-4);
    EXPECT_NEAR(1000.0 * (1.0 - p_not11(4)), 513.5, 0.1);
}

TEST(Classifier, TwoSingleClicksGiveTheirPairAndParity) {
    Rng rng(2);
    ClickClassifier c(ClickRule::kAtLeastTwo);
    c.feed(1, {false, true}, rng);
    c.feed(2, {false, false}, rng);
    c.feed(3, {true, false}, rng);
    c.feed(4, {false, false}, rng);
    const auto o = c.result();
    ASSERT_TRUE(o.is_conclusive());
    EXPECT_EQ(*o.tuple, (Tuple{1, 3}));
    EXPECT_TRUE(o.parity);
}

TEST(Classifier, ThreeClicksDependOnTheRule) {
    Rng rng(3);
    ClickClassifier exact(ClickRule::kExactlyTwo);
    ClickClassifier loose(ClickRule::kAtLeastTwo);
    for (int k = 1; k <= 3; ++k) {
        exact.feed(k, {true, false}, rng);
        loose.feed(k, {true, false}, rng);
    }
    EXPECT_FALSE(exact.result().is_conclusive());
    ASSERT_TRUE(loose.result().is_conclusive());
    EXPECT_FALSE(loose.result().parity);
}

TEST(Classifier, DoubleClickIsInconclusive) {
    Rng rng(4);
    ClickClassifier c(ClickRule::kAtLeastTwo);
    c.feed(1, {true, false}, rng);
    c.feed(2, {true, true}, rng);
    c.feed(3, {false, true}, rng);
    EXPECT_FALSE(c.result().is_conclusive());
}

TEST(Classifier, ReservoirPairIsUniform) {
    // Five single clicks: each of the ten pairs should be kept with probability 1/10.
    Rng rng(5);
    std::vector<int> counts(tuple_count(5), 0);
    constexpr int kRuns = 100000;
    for (int i = 0; i < kRuns; ++i) {
        ClickClassifier c(ClickRule::kAtLeastTwo);
        for (int k = 1; k <= 5; ++k) c.feed(k, {true, false}, rng);
        ++counts[tuple_index(5, *c.result().tuple)];
    }
    for (int v : counts) EXPECT_NEAR(v / double(kRuns), 0.1, 4 * se(0.1, kRuns));
}

TEST(RunSmCoherent, HonestRunsNeverMisreportParity) {
    for (int n : {4, 8, 14}) {
        Rng rng(static_cast<std::uint64_t>(n));
        constexpr std::size_t kRuns = 20000;
        std::size_t inconclusive = 0;
        for (std::size_t i = 0; i < kRuns; ++i) {
            const auto x = BitString::random(n, rng);
            const auto run = run_sm_coherent(encode_coherent(x), rng);
            ASSERT_EQ(run.clicks.size(), static_cast<std::size_t>(n));
            for (const auto& s : run.clicks.steps) {
                ASSERT_FALSE(s.d0 && s.d1);
            }
            if (!run.outcome.is_conclusive()) {
                ++inconclusive;
            } else {
                ASSERT_EQ(run.outcome.parity, x.parity(*run.outcome.tuple));
            }
        }
        EXPECT_NEAR(inconclusive / double(kRuns), p_not11(n), 4 * se(p_not11(n), kRuns));
    }
}

TEST(RunSmCoherent, ExactlyTwoRuleRateAndUniformTuples) {
    constexpr int n = 4;
    Rng rng(6);
    constexpr std::size_t kRuns = 100000;
    std::vector<std::size_t> per_tuple(tuple_count(n), 0);
    std::size_t conclusive = 0;
    for (std::size_t i = 0; i < kRuns; ++i) {
        const auto run = run_sm_coherent(encode_coherent(BitString::random(n, rng)), rng, ClickRule::kExactlyTwo);
        if (run.outcome.is_conclusive()) {
            ++conclusive;
            ++per_tuple[tuple_index(n, *run.outcome.tuple)];
        }
    }
    const double p = coherent_conclusive_probability(n, ClickRule::kExactlyTwo);
    EXPECT_NEAR(conclusive / double(kRuns), p, 4 * se(p, kRuns));
    const double p1 = honest_click_probability(n);
    const double pair = p1 * p1 * std::pow(1.0 - p1, n - 2);
    for (std::size_t c : per_tuple) {
        EXPECT_NEAR(c / double(conclusive), pair / p, 4 * se(pair / p, conclusive));
    }
}

TEST(RunSmCoherent, DetectorClicksAreIndependent) {
    // A pulse with a quarter-turn phase lights both detectors.
    constexpr int n = 4;
    CoherentNoteCopy copy{std::vector<Complex>(n, Complex(0.0, 0.5))};
    const double lo = 0.5;
    const double p0 = click_probability((lo + Complex(0.0, 0.5)) / std::sqrt(2.0));
    const double p1 = click_probability((lo - Complex(0.0, 0.5)) / std::sqrt(2.0));
    Rng rng(7);
    constexpr std::size_t kRuns = 100000;
    std::size_t both = 0, only0 = 0, only1 = 0, none = 0;
    for (std::size_t i = 0; i < kRuns; ++i) {
        const auto s = run_sm_coherent(copy, rng).clicks.steps[0];
        both += s.d0 && s.d1;
        only0 += s.d0 && !s.d1;
        only1 += !s.d0 && s.d1;
        none += !s.d0 && !s.d1;
    }
    const double expected[] = {p0 * p1, p0 * (1 - p1), (1 - p0) * p1, (1 - p0) * (1 - p1)};
    const std::size_t observed[] = {both, only0, only1, none};
    double chi2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e = expected[i] * kRuns;
        chi2 += (observed[i] - e) * (observed[i] - e) / e;
    }
    EXPECT_LT(chi2, 21.1);  // 99.99th percentile at 3 dof
}

TEST(CoherentProtocol, HonestNoteIsAccepted) {
    SchemeParams p;
    p.n = 4;
    p.q = 400;
    p.l_size = 200;
    p.t_max = 400;
    p.epsilon = 0.2;
    p.delta = 0.2;
    Rng rng(8);
    const CoherentBackend backend;
    auto prepared = prepare_note(p, backend, rng);
    const auto local = coherent_local_test(prepared.note, p, rng);
    ASSERT_TRUE(local.verdict.accepted());
    EXPECT_EQ(count_correct(prepared.secret, local.report), local.report.l_succ);
    EXPECT_TRUE(coherent_bank_validate(prepared.secret, local.report, p).accepted());
    EXPECT_EQ(prepared.secret.count, 1U);
    EXPECT_EQ(parse_click_rule(click_rule_name(ClickRule::kExactlyTwo)), ClickRule::kExactlyTwo);
}

}  // namespace
}  // namespace smmoney
