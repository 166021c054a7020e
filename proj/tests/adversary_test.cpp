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
#include <set>

#include "smmoney/adversary.hpp"

namespace smmoney {
namespace {

SchemeParams attack_params() {
    SchemeParams p;
    p.n = 4;
    p.q = 400;
    p.l_size = 20;
    p.t_max = 100;  // five Bank contacts
    p.epsilon = 0.2;
    p.delta = 0.2;
    return p;
}

double se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

TEST(RegisterManipulation, WithholdsComplementaryPositions) {
    const SchemeParams p = attack_params();
    Rng rng(1);
    auto prepared = prepare_note(p, rng);
    const auto forged =
        forge_two_notes(AttackStrategy::honest().with_register_manipulation(), prepared.note, p, rng);
    const std::size_t withheld = (p.max_bank_contacts() - 1) * p.l_size;
    EXPECT_EQ(forged.first.consumed(), withheld);
    EXPECT_EQ(forged.second.consumed(), withheld);
    for (std::size_t j = 0; j < p.q; ++j) {
        ASSERT_FALSE(forged.first.r[j] && forged.second.r[j]);
        if (forged.first.r[j]) {
            EXPECT_EQ(forged.origin_second[j], CopyOrigin::kGenuine);
            EXPECT_EQ(std::get<BitString>(forged.second.copies[j].state), prepared.secret.strings[j]);
        }
        if (forged.second.r[j]) {
            EXPECT_EQ(forged.origin_first[j], CopyOrigin::kGenuine);
        }
    }
}

TEST(RegisterManipulation, WithheldPositionsAreNeverSelected) {
    const SchemeParams p = attack_params();
    Rng rng(2);
    auto prepared = prepare_note(p, rng);
    auto forged = forge_two_notes(AttackStrategy::honest().with_register_manipulation(), prepared.note, p, rng);
    const auto withheld = forged.first.r;
    for (int rep = 0; rep < 50; ++rep) {
        auto note = forged.first;
        const auto local = local_test(note, p, SinglePhotonBackend{}, rng);
        ASSERT_EQ(local.report.records.size(), p.l_size);
        for (const auto& rec : local.report.records) EXPECT_EQ(withheld[rec.j], 0);
    }
}

TEST(RegisterManipulation, TenContactsLeaveNineThousandGenuineCopies) {
    SchemeParams p;
    p.n = 4;
    p.l_size = 1000;
    p.t_max = 10 * p.l_size;
    p.q = 10 * p.t_max;
    EXPECT_EQ(register_withheld(p), 9000U);
}

TEST(Adaptive, LearnsAtMostAMinusTwoBatches) {
    const SchemeParams p = attack_params();
    Rng rng(3);
    auto prepared = prepare_note(p, rng);
    const auto forged = forge_two_notes(AttackStrategy::honest().with_register_manipulation().with_adaptive(),
                                        prepared.note, p, rng);
    const std::size_t a = p.max_bank_contacts();
    EXPECT_EQ(forged.known.size(), (a - 2) * p.l_size);
    EXPECT_EQ(forged.auxiliary_contacts, a - 2);
    std::size_t attacked = 0;
    for (std::size_t j = 0; j < p.q; ++j) attacked += forged.origin_first[j] == CopyOrigin::kAttacked;
    // Unknown copies: q - (3A - 4)|L|.
    EXPECT_EQ(attacked, p.q - (3 * a - 4) * p.l_size);

    std::vector<std::size_t> too_many((a - 2) * p.l_size + 1);
    for (std::size_t i = 0; i < too_many.size(); ++i) too_many[i] = i;
    EXPECT_THROW(forge_two_notes(AttackStrategy::honest().with_adaptive(too_many), prepared.note, p, rng),
                 std::invalid_argument);
}

TEST(Bounds, MinimumErrorMatchesTheNoiseTolerance) {
    EXPECT_NEAR(e_min_asymptotic(14), 0.2142857, 1e-6);
    EXPECT_NEAR(e_min_asymptotic(14), 0.2143, 1e-4);
    EXPECT_DOUBLE_EQ(e_min_asymptotic(4), 0.125);
    EXPECT_DOUBLE_EQ(e_min_asymptotic(2), 0.0);
    for (int n = 3; n < 30; ++n) EXPECT_LT(e_min_asymptotic(n), e_min_asymptotic(n + 1));
    for (int n = 3; n < 30; ++n) {
        EXPECT_NEAR(e_min_asymptotic(n), 0.5 * optimal_collective_error_bound(n), 1e-15);
    }
    EXPECT_DOUBLE_EQ(optimal_collective_error_bound(4), 0.25);
    EXPECT_NEAR(optimal_collective_error_bound(100000), 0.5, 1e-4);
}

TEST(Bounds, DilutedMinimumErrorAtLambdaOneThousandth) {
    SchemeParams p;
    p.n = 14;
    p.l_size = 1000;
    p.t_max = 10 * p.l_size;
    p.q = 1000 * 10 * p.l_size;
    const double q = static_cast<double>(p.q);
    const double expected = (q - 26.0 * 1000) / (q - 9.0 * 1000) * (0.25 - 1.0 / 28.0);
    EXPECT_NEAR(e_min(p), expected, 1e-12);
    EXPECT_NEAR(e_min(p) / e_min_asymptotic(14), 997.0 / 999.0, 1e-3);
    // One Bank contact: no register or adaptive advantage.
    p.t_max = p.l_size;
    EXPECT_NEAR(e_min(p), e_min_asymptotic(14), 1e-15);
}

TEST(Bounds, ForgeProbability) {
    SchemeParams p;
    p.n = 14;
    p.l_size = 1000;
    p.q = 1000;
    p.t_max = 1000;
    p.epsilon = 0.1;
    EXPECT_DOUBLE_EQ(forge_probability_bound(p, 0.0), 1.0);
    const double p11 = 13.0 / 14.0;
    const double expected = std::exp(-2.0 * 0.107 * 0.107 * p11 * p11 * 0.81 * 1000);
    EXPECT_NEAR(forge_probability_bound(p, 0.107), expected, 1e-18);
    EXPECT_NEAR(std::log(forge_probability_bound(p, 0.107)), -16.0, 0.1);
    EXPECT_NEAR(std::log(measure_resend_forge_bound(4, 1000, 1.0 / 6.0)), -41.6667, 1e-3);
    EXPECT_LE(measure_resend_forge_bound(4, 1000, 1.0 / 6.0), std::exp(-41.0));
}

TEST(MeasureResend, LearnedPairAlwaysCarriesTheRightParity) {
    Rng rng(4);
    for (int rep = 0; rep < 5000; ++rep) {
        const auto x = BitString::random(4, rng);
        const auto m = measure_resend(SinglePhotonMixedState::from_pure(encode_note_state(x)), rng);
        ASSERT_EQ(m.parity, x.parity(m.learned));
        const double sign = (m.resent.amplitude(m.learned.k) * m.resent.amplitude(m.learned.l)).real();
        EXPECT_EQ(sign < 0, m.parity);
        EXPECT_TRUE(m.learned == (Tuple{1, 2}) || m.learned == (Tuple{3, 4}));
    }
}

TEST(MeasureResend, BasisRequiresEvenModes) {
    Rng rng(5);
    const auto state6 = SinglePhotonMixedState::from_pure(encode_note_state(BitString::zeros(6)));
    EXPECT_THROW(measure_resend(state6, rng, false), std::invalid_argument);
    EXPECT_NO_THROW(measure_resend(state6, rng, true));
    const auto state5 = SinglePhotonMixedState::from_pure(encode_note_state(BitString::zeros(5)));
    EXPECT_THROW(measure_resend(state5, rng, true), std::invalid_argument);
}

TEST(MeasureResend, PerCopyRates) {
    SchemeParams p;
    p.n = 4;
    p.q = 2000;
    p.l_size = 1000;
    p.t_max = 2000;  // two Bank contacts, one per forged note
    p.delta = 1.0 / 6.0;
    const auto stats = simulate_forgery(AttackStrategy::measure_resend(), p, 40, 6);
    const std::size_t tested = stats.ver1.attacked_tested + stats.ver2.attacked_tested;
    const std::size_t conclusive = stats.ver1.attacked_conclusive + stats.ver2.attacked_conclusive;
    EXPECT_NEAR(stats.inconclusive_rate(), 0.25, 4 * se(0.25, tested));
    EXPECT_NEAR(stats.error_rate_given_conclusive(), 5.0 / 12.0, 4 * se(5.0 / 12.0, conclusive));
    EXPECT_NEAR(stats.per_copy_error_rate(), 5.0 / 16.0, 4 * se(5.0 / 16.0, tested));
    EXPECT_DOUBLE_EQ(measure_resend_error_given_conclusive(4), 5.0 / 12.0);
    EXPECT_EQ(stats.joint_passes, 0U);
}

TEST(CollectiveCloner, DiscardBothGivesHalfOfOneMinusOneOverN) {
    SchemeParams p;
    p.n = 4;
    p.q = 500;
    p.l_size = 500;
    p.t_max = 500;
    const auto stats = simulate_forgery(AttackStrategy::collective(ChoiMatrix::discard_both(4)), p, 40, 7);
    const double expected = 0.5 * (1.0 - 0.25);
    EXPECT_NEAR(ForgeryStats::ratio(stats.ver1.attacked_wrong, stats.ver1.attacked_tested), expected,
                4 * se(expected, stats.ver1.attacked_tested));
    EXPECT_NEAR(stats.inconclusive_rate(), 0.25, 4 * se(0.25, 2 * stats.ver1.attacked_tested));
}

TEST(CollectiveCloner, IdentityToFirstVerifierOnly) {
    SchemeParams p;
    p.n = 4;
    p.q = 500;
    p.l_size = 500;
    p.t_max = 500;
    const auto stats = simulate_forgery(AttackStrategy::collective(ChoiMatrix::identity_and_discard(4)), p, 20, 8);
    EXPECT_EQ(stats.ver1.attacked_wrong, 0U);
    EXPECT_EQ(stats.ver1.passes, 20U);
    const double expected = 0.375;
    EXPECT_NEAR(ForgeryStats::ratio(stats.ver2.attacked_wrong, stats.ver2.attacked_tested), expected,
                4 * se(expected, stats.ver2.attacked_tested));
}

TEST(HonestStrategy, SecondNoteGuessesParities) {
    SchemeParams p;
    p.n = 4;
    p.q = 400;
    p.l_size = 400;
    p.t_max = 400;
    const auto stats = simulate_forgery(AttackStrategy::honest(), p, 20, 9);
    EXPECT_EQ(stats.ver1.passes, 20U);
    EXPECT_EQ(stats.ver1.wrong, 0U);
    const double rate = ForgeryStats::ratio(stats.ver2.wrong, stats.ver2.conclusive);
    EXPECT_NEAR(rate, 0.5, 4 * se(0.5, stats.ver2.conclusive));
    EXPECT_EQ(stats.joint_passes, 0U);
}

TEST(Simulation, ResultsDoNotDependOnWorkerCount) {
    const SchemeParams p = attack_params();
    const auto s = AttackStrategy::measure_resend().with_register_manipulation();
    const auto one = simulate_forgery(s, p, 12, 10, 1);
    const auto three = simulate_forgery(s, p, 12, 10, 3);
    ASSERT_EQ(one.per_trial.size(), three.per_trial.size());
    for (std::size_t t = 0; t < one.per_trial.size(); ++t) {
        EXPECT_EQ(one.per_trial[t].l_succ1, three.per_trial[t].l_succ1);
        EXPECT_EQ(one.per_trial[t].l_succ_cor2, three.per_trial[t].l_succ_cor2);
        EXPECT_EQ(one.per_trial[t].ver1.reason, three.per_trial[t].ver1.reason);
    }
    EXPECT_EQ(one.ver1.attacked_wrong, three.ver1.attacked_wrong);
    EXPECT_THROW(simulate_forgery(s, p, 0, 1), std::invalid_argument);
}

TEST(Strategy, NamesDescribeTheComposition) {
    EXPECT_EQ(AttackStrategy::honest().name(), "honest");
    EXPECT_EQ(AttackStrategy::measure_resend().with_register_manipulation().with_adaptive().name(),
              "measure_resend+register+adaptive");
}

}  // namespace
}  // namespace smmoney
