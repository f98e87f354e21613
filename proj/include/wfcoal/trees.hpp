#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wfcoal/flows.hpp"
#include "wfcoal/mapping.hpp"
#include "wfcoal/rational.hpp"

namespace wfcoal {

// Ancestor counts per generation: q[0] = N >= q[1] >= ... >= q[depth] > 1,
// with an implicit terminal 1 (the root).
struct LevelProfile {
    std::vector<int> q;
    int depth() const { return static_cast<int>(q.size()) - 1; }
    long total() const {
        long t = 0;
        for (int v : q) t += v;
        return t;
    }
    bool operator==(const LevelProfile& other) const { return q == other.q; }
};

// All profiles of the given depth, lexicographic. Guarded against blowup.
std::vector<LevelProfile> enumerate_profiles(int n_particles, int depth,
                                             std::uint64_t guard = 10'000'000);

// Number of surjections [m] ->> [k] = k! S(m, k).
BigInt surjection_count(int m, int k);

// A sequence of surjections a_p : [q_p] ->> [q_{p+1}] (0-based values),
// terminal codomain [1]. a[p] has length q_p.
using SurjSeq = std::vector<std::vector<int>>;

void validate_surjection_sequence(const SurjSeq& a, int n_particles);
LevelProfile profile_of(const SurjSeq& a, int n_particles);

// All surjections [m] ->> [k] / only the weakly increasing ones.
std::vector<std::vector<int>> enumerate_surjections(int m, int k, std::uint64_t guard = 10'000'000);
std::vector<std::vector<int>> enumerate_weakly_increasing_surjections(int m, int k);

// pi(a) = (a_0, a_1 a_0, ...), embedded as maps [N] -> [N] (images sit in the
// leading segment).
std::vector<ParentMap> pi_compose(const SurjSeq& a, int n_particles);

// Relabels each image set to a leading segment by its increasing bijection,
// recovering the canonical surjection sequence of a coalescent history.
SurjSeq standardize(const std::vector<ParentMap>& history);

// s(a) = (s_1 a_0 s_0^-1, ..., a_n s_n^-1); s[p] is a permutation of [q_p].
SurjSeq group_action(const std::vector<std::vector<int>>& s, const SurjSeq& a);

// Rooted tree with leaves only at the top level, children kept in canonical
// normal form (sorted encodings with multiplicities).
class PlanarTree {
  public:
    static PlanarTree from_surjections(const SurjSeq& a, int n_particles);
    // Grammar: node = "(" children ")" with children space-separated, each a
    // node optionally followed by "^mult"; a leaf is "( )".
    static PlanarTree parse(const std::string& text);

    std::string encode() const { return encoding_; }
    int height() const { return height_; }
    long vertex_count() const { return vertex_count_; }
    // |Z(t)|: product over all internal vertices of the factorials of the
    // multiplicity pattern of their child subtrees.
    const BigInt& stabilizer_order() const { return stabilizer_; }

    bool operator==(const PlanarTree& other) const { return encoding_ == other.encoding_; }
    bool operator<(const PlanarTree& other) const { return encoding_ < other.encoding_; }

    PlanarTree() = default;

  private:
    std::string encoding_;
    int height_ = 0;
    long vertex_count_ = 0;
    BigInt stabilizer_;
};

// One orbit of the per-level relabeling action: its canonical representative
// (the lexicographically least weakly increasing sequence), the abstract
// tree, and the orbit-stabilizer split of prod q_p!.
struct OrbitRep {
    SurjSeq rep;
    PlanarTree tree;
    BigInt stabilizer;
    BigInt orbit_size;
};

std::vector<OrbitRep> enumerate_orbit_reps(const LevelProfile& profile);

// Weight carried by every surjection sequence with the given profile in the
// invariant-measure expansion: N (N)_q / (N^|q| q!). This is the grouped
// form rebuilt from the excursion measure p(c); the per-class subset count
// runs over the image sizes (q_1, ..., q_n, 1), which contributes the
// leading factor N relative to naive (N)_q/q! bookkeeping.
Rat sequence_weight(const LevelProfile& profile);

// Total expansion weight at the given depth; equals P(T = depth) of the
// most-recent-common-ancestor time exactly.
Rat level_mass(int n_particles, int depth);

// Partial expansion truncated at max_depth, summed over entire orbits
// (exchangeable by construction). Intended for tiny instances; exact with
// S = Rat.
template <typename S>
DistVec<S> series_partial_orbit_expanded(const MutationKernel<S>& kernel, const std::vector<S>& eta,
                                         int n_particles, int max_depth) {
    auto out = DistVec<S>::zero(n_particles, kernel.type_count());
    if (n_particles == 1) {
        for (std::size_t t = 0; t < eta.size(); ++t) out.weights[t] = eta[t];
        return out;
    }
    for (int depth = 0; depth <= max_depth; ++depth) {
        for (const auto& profile : enumerate_profiles(n_particles, depth)) {
            const Rat w = sequence_weight(profile);
            const S weight = [&] {
                if constexpr (std::is_same_v<S, double>)
                    return to_double(w);
                else
                    return w;
            }();
            // odometer over per-level surjection choices
            std::vector<std::vector<std::vector<int>>> level_choices;
            for (int p = 0; p <= depth; ++p) {
                const int from = profile.q[static_cast<std::size_t>(p)];
                const int to = p == depth ? 1 : profile.q[static_cast<std::size_t>(p + 1)];
                level_choices.push_back(enumerate_surjections(from, to));
            }
            std::vector<std::size_t> pick(level_choices.size(), 0);
            for (;;) {
                SurjSeq a;
                for (std::size_t p = 0; p < pick.size(); ++p) a.push_back(level_choices[p][pick[p]]);
                auto mu = genealogy_measure(kernel, eta, pi_compose(a, n_particles));
                for (std::size_t idx = 0; idx < out.weights.size(); ++idx)
                    out.weights[idx] += weight * mu.weights[idx];
                std::size_t pos = 0;
                while (pos < pick.size() && ++pick[pos] == level_choices[pos].size()) {
                    pick[pos] = 0;
                    ++pos;
                }
                if (pos == pick.size()) break;
            }
        }
    }
    return out;
}

// Same truncation evaluated per orbit: weight N (N)_q / (N^|q| |Z(t)|) on the
// canonical representative. NOT exchangeable until symmetrized.
template <typename S>
DistVec<S> series_partial_orbit_compressed(const MutationKernel<S>& kernel, const std::vector<S>& eta,
                                           int n_particles, int max_depth) {
    auto out = DistVec<S>::zero(n_particles, kernel.type_count());
    if (n_particles == 1) {
        for (std::size_t t = 0; t < eta.size(); ++t) out.weights[t] = eta[t];
        return out;
    }
    for (int depth = 0; depth <= max_depth; ++depth) {
        for (const auto& profile : enumerate_profiles(n_particles, depth)) {
            const Rat w = sequence_weight(profile);
            for (const auto& orbit : enumerate_orbit_reps(profile)) {
                const Rat tree_weight = w * Rat(orbit.orbit_size);
                const S weight = [&] {
                    if constexpr (std::is_same_v<S, double>)
                        return to_double(tree_weight);
                    else
                        return tree_weight;
                }();
                auto mu = genealogy_measure(kernel, eta, pi_compose(orbit.rep, n_particles));
                for (std::size_t idx = 0; idx < out.weights.size(); ++idx)
                    out.weights[idx] += weight * mu.weights[idx];
            }
        }
    }
    return out;
}

// The genealogical-tree expansion of the stationary population law,
// truncated once the exact tail certificate 2 P(T > depth) drops below eps.
struct SeriesResult {
    DistVec<double> measure;
    double radius = 0;  // certified paper-norm error of the truncation
    int depth = 0;
};

SeriesResult invariant_measure_series(const MutationKernel<double>& kernel, int particles, double eps);

}  // namespace wfcoal
