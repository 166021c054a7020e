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

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "smmoney/core.hpp"
#include "smmoney/fock.hpp"
#include "smmoney/rng.hpp"

namespace smmoney {

/// All n(n-1)/2 pairs (k, l), 1 <= k < l <= n, lexicographically sorted.
class TupleSet {
  public:
    explicit TupleSet(int n) : n_(n) {
        require_modes(n);
        tuples_.reserve(tuple_count(n));
        for (int k = 1; k <= n; ++k) {
            for (int l = k + 1; l <= n; ++l) {
                tuples_.push_back({k, l});
            }
        }
    }

    int modes() const { return n_; }
    std::size_t size() const { return tuples_.size(); }
    const Tuple& operator[](std::size_t i) const { return tuples_[i]; }
    auto begin() const { return tuples_.begin(); }
    auto end() const { return tuples_.end(); }

    bool contains(Tuple t) const { return t.k >= 1 && t.k < t.l && t.l <= n_; }

  private:
    int n_;
    std::vector<Tuple> tuples_;
};

inline TupleSet tuple_set(int n) { return TupleSet(n); }

/// What the verifier learns from one copy: a tuple and its parity, or nothing.
struct SmOutcome {
    std::optional<Tuple> tuple;
    bool parity = false;

    static SmOutcome inconclusive() { return {}; }
    static SmOutcome conclusive(Tuple t, bool parity) { return {t, parity}; }

    bool is_conclusive() const { return tuple.has_value(); }

    friend bool operator==(const SmOutcome&, const SmOutcome&) = default;
};

inline SmOutcome classify(const DetectorEvent& event) {
    if (event.kind == DetectorEvent::Kind::kTwoSameMode) {
        return SmOutcome::inconclusive();
    }
    return SmOutcome::conclusive({event.k, event.l}, event.port_k != event.port_l);
}

/// Inverse-CDF draw over the canonical event ordering.
inline std::size_t sample_index(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            acc += probs[i];
            last_positive = i;
            if (u < acc) {
                return i;
            }
        }
    }
    // Rounding left u beyond the accumulated mass.
    return last_positive;
}

inline DetectorEvent sample_event(const OutcomeDistribution& dist, Rng& rng) {
    return dist.event_at(sample_index(dist.probabilities(), rng));
}

inline SmOutcome run_sm(const SinglePhotonState& holder, Rng& rng) {
    return classify(sample_event(interfere_pure(holder, local_reference_state(holder.modes())), rng));
}

inline SmOutcome run_sm(const SinglePhotonMixedState& holder, Rng& rng) {
    return classify(sample_event(interfere_mixed(holder, local_reference_state(holder.modes())), rng));
}

/// Probability of a conclusive outcome for any one-photon input, 1 - 1/n.
inline double single_photon_conclusive_probability(int n) {
    require_modes(n);
    return 1.0 - 1.0 / static_cast<double>(n);
}

}  // namespace smmoney
