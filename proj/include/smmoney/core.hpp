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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "smmoney/rng.hpp"

namespace smmoney {

/// Tolerance used for every state / distribution invariant check.
inline constexpr double kTolerance = 1e-9;

/// Bit strings are packed into one machine word.
inline constexpr std::size_t kMaxModes = 64;

/// Raised when a caller violates a protocol rule (as opposed to passing a
/// malformed value, which raises std::invalid_argument).
class ProtocolError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unordered mode pair, stored canonically with 1-based labels k < l.
struct Tuple {
    int k = 0;
    int l = 0;

    friend auto operator<=>(const Tuple&, const Tuple&) = default;
};

/// Position of tuple (k, l) in the lexicographic enumeration of all pairs.
inline std::size_t tuple_index(int n, Tuple t) {
    const auto k = static_cast<std::size_t>(t.k);
    const auto l = static_cast<std::size_t>(t.l);
    const auto nn = static_cast<std::size_t>(n);
    return (k - 1) * (2 * nn - k) / 2 + (l - k - 1);
}

inline std::size_t tuple_count(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

/// Closed-form expressions hold for any n >= 2; only simulation is capped.
inline void require_formula_modes(int n) {
    if (n < 2) {
        throw std::invalid_argument("mode count " + std::to_string(n) + " is below the minimum of 2");
    }
}

inline void require_modes(int n, int minimum = 2) {
    if (n < minimum) {
        throw std::invalid_argument("mode count " + std::to_string(n) + " is below the minimum of " +
                                    std::to_string(minimum));
    }
    if (static_cast<std::size_t>(n) > kMaxModes) {
        throw std::invalid_argument("mode count " + std::to_string(n) + " exceeds " +
                                    std::to_string(kMaxModes));
    }
}

/// Binary string x in {0,1}^n. Bit k (1-based) lives at mask bit k-1.
class BitString {
  public:
    BitString() = default;

    BitString(int n, std::uint64_t bits) : n_(n), bits_(bits) {
        require_modes(n, 1);
        if (static_cast<std::size_t>(n) < kMaxModes) {
            bits_ &= (std::uint64_t{1} << n) - 1;
        }
    }

    static BitString zeros(int n) { return BitString(n, 0); }

    static BitString random(int n, Rng& rng) { return BitString(n, rng.next()); }

    /// Parses "0101" (first character is bit 1).
    static BitString parse(std::string_view text) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '1') {
                bits |= std::uint64_t{1} << i;
            } else if (text[i] != '0') {
                throw std::invalid_argument("bit string may only contain '0' and '1'");
            }
        }
        return BitString(static_cast<int>(text.size()), bits);
    }

    int size() const { return n_; }
    std::uint64_t mask() const { return bits_; }

    /// 1-based bit access.
    bool bit(int k) const { return ((bits_ >> (k - 1)) & 1U) != 0; }

    /// (-1)^{x_k}
    double sign(int k) const { return bit(k) ? -1.0 : 1.0; }

    bool parity(Tuple t) const { return bit(t.k) != bit(t.l); }

    std::string str() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int k = 1; k <= n_; ++k) {
            if (bit(k)) {
                s[static_cast<std::size_t>(k - 1)] = '1';
            }
        }
        return s;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

  private:
    int n_ = 0;
    std::uint64_t bits_ = 0;
};

inline int hamming_distance(const BitString& a, const BitString& b) {
    return __builtin_popcountll(a.mask() ^ b.mask());
}

}  // namespace smmoney
