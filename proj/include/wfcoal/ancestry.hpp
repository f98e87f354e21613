#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wfcoal/mapping.hpp"
#include "wfcoal/rational.hpp"
#include "wfcoal/rng.hpp"

namespace wfcoal {

// A coalescent history (c_0, ..., c_l): weakly decreasing, constant only at
// the last entry. length() is l; the single-map history has length 0.
class Excursion {
  public:
    // Validates the excursion invariants; throws on malformed input.
    explicit Excursion(std::vector<ParentMap> maps);

    int population_size() const { return maps_[0].size(); }
    int length() const { return static_cast<int>(maps_.size()) - 1; }
    const std::vector<ParentMap>& maps() const { return maps_; }
    const ParentMap& last() const { return maps_.back(); }

    // |c| = sum of image sizes over the entries.
    long total_size() const;

    // 1-based label of the constant map ending the excursion.
    int mrca_label() const { return maps_.back().boundary_label(); }

    // "2,1;1,1" (entries joined by ';').
    std::string encode() const;
    static Excursion decode(const std::string& text);

    bool operator==(const Excursion& other) const { return maps_ == other.maps_; }

  private:
    std::vector<ParentMap> maps_;
};

// One backward step B -> A B with A uniform.
ParentMap backward_step(const ParentMap& b, Rng& rng);

// P(B_n = b | B_{n-1} = a) = N^{-|a|} when b <= a, else 0.
Rat conditional_transition_prob(const ParentMap& a, const ParentMap& b);

// Run B_0 = A_0, B_n = A_n B_{n-1} until the boundary; returns (B_0,...,B_T).
Excursion run_to_absorption(int n, Rng& rng);

// p(c) = N^{-(N + |c| - 1)}, the excursion measure.
Rat excursion_probability(const Excursion& e);

// Right-composition with truncation at the first boundary entry. The input is
// a weakly decreasing sequence starting at Id (the (Id, B) convention). When
// no entry becomes constant the full composed sequence is returned with
// absorbed = false.
struct StarComposeResult {
    std::vector<ParentMap> maps;
    bool absorbed = false;
};
StarComposeResult star_compose(const std::vector<ParentMap>& id_prefixed, const ParentMap& a);

// Streams every excursion of length <= max_len exactly once, ordered by
// length then lexicographically by the concatenated map encodings. Only
// feasible for tiny N; refuses when the exact predicted count exceeds the
// guard.
void enumerate_excursions(int n, int max_len, const std::function<void(const Excursion&)>& sink,
                          std::uint64_t guard = 10'000'000);

// Exact number of excursions of each length 0..max_len (cheap DP; used for
// the feasibility guard and as a counting oracle in tests).
std::vector<std::uint64_t> count_excursions(int n, int max_len);

}  // namespace wfcoal
