#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wfcoal/rng.hpp"

namespace wfcoal {

// A parent-choice map a : [N] -> [N], one generation of ancestry. Targets are
// stored 0-based; all text I/O is 1-based ("2,1,1"). Immutable in spirit:
// operations return fresh values.
class ParentMap {
  public:
    ParentMap() = default;
    // 0-based targets; validates range.
    explicit ParentMap(std::vector<int> targets);

    static ParentMap identity(int n);
    // The constant map e_i (1-based label i).
    static ParentMap constant(int n, int label);

    int size() const { return static_cast<int>(targets_.size()); }
    // 0-based image of i (0-based).
    int operator()(int i) const { return targets_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& targets() const { return targets_; }

    // |a| = #a([N]).
    int image_size() const;
    bool is_boundary() const { return image_size() == 1; }
    // For boundary maps, the 1-based label i with a == e_i.
    int boundary_label() const;
    bool is_identity() const;

    // Sorted 0-based image values.
    std::vector<int> image() const;

    bool operator==(const ParentMap& other) const { return targets_ == other.targets_; }
    bool operator<(const ParentMap& other) const { return targets_ < other.targets_; }

    // "2,1,1" (1-based).
    std::string encode() const;
    static ParentMap decode(const std::string& text);

  private:
    std::vector<int> targets_;
};

// (a b)(i) = a(b(i)).
ParentMap compose(const ParentMap& a, const ParentMap& b);

// a <= c in the factorization order: exists b with a = b c. Implemented by
// the level-set criterion: a is constant on every level set of c.
bool leq(const ParentMap& a, const ParentMap& c);

// Uniform draw among the N^N maps.
ParentMap sample_uniform_map(int n, Rng& rng);

// All N^N maps in lexicographic target order. Guarded; refuse when the count
// exceeds the cap.
std::vector<ParentMap> enumerate_all_maps(int n, std::size_t cap = 10'000'000);

// A population of N typed individuals; values are 0-based indices into a
// finite type space for the exact solvers, or arbitrary ints in Monte Carlo.
struct Population {
    std::vector<int> values;
    int size() const { return static_cast<int>(values.size()); }
    bool operator==(const Population& other) const { return values == other.values; }
};

// x^a = (x[a(i)])_i, the selection transition D_a.
Population apply_selection(const ParentMap& a, const Population& x);

}  // namespace wfcoal
