#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "wfcoal/mapping.hpp"
#include "wfcoal/rational.hpp"
#include "wfcoal/rng.hpp"

namespace wfcoal {

namespace detail {

inline double scalar_abs(double x) { return std::fabs(x); }
inline Rat scalar_abs(const Rat& x) { return rat_abs(x); }
inline double scalar_from_ratio(long num, long den) { return static_cast<double>(num) / static_cast<double>(den); }

template <typename S>
S ratio_as(long num, long den);
template <>
inline double ratio_as<double>(long num, long den) { return scalar_from_ratio(num, den); }
template <>
inline Rat ratio_as<Rat>(long num, long den) { return make_rat(num, den); }

inline bool close_to(double value, double target, double tol) { return std::fabs(value - target) <= tol; }
inline bool close_to(const Rat& value, const Rat& target, const Rat&) { return value == target; }

}  // namespace detail

// Row-stochastic mutation kernel over a finite type space, with an optional
// known stationary distribution. S is double or Rat.
template <typename S>
struct MutationKernel {
    std::vector<std::vector<S>> rows;
    std::optional<std::vector<S>> stationary;

    int type_count() const { return static_cast<int>(rows.size()); }

    void validate(double tol = 1e-12) const {
        const std::size_t e = rows.size();
        if (e == 0) throw std::invalid_argument("MutationKernel: empty");
        for (const auto& row : rows) {
            if (row.size() != e) throw std::invalid_argument("MutationKernel: not square");
            S sum = S(0);
            for (const auto& v : row) {
                if (v < S(0)) throw std::invalid_argument("MutationKernel: negative entry");
                sum += v;
            }
            if (!detail::close_to(sum, S(1), S_tol(tol))) throw std::invalid_argument("MutationKernel: row sum != 1");
        }
        if (stationary) {
            if (stationary->size() != e) throw std::invalid_argument("MutationKernel: stationary size");
            std::vector<S> image(e, S(0));
            for (std::size_t x = 0; x < e; ++x)
                for (std::size_t y = 0; y < e; ++y) image[y] += (*stationary)[x] * rows[x][y];
            for (std::size_t y = 0; y < e; ++y)
                if (!detail::close_to(image[y], (*stationary)[y], S_tol(tol)))
                    throw std::invalid_argument("MutationKernel: stationary is not invariant");
        }
    }

  private:
    static S S_tol(double tol) {
        if constexpr (std::is_same_v<S, double>)
            return tol;
        else
            return Rat(0);
    }
};

// Probability distribution over populations E^N, indexed lexicographically:
// population (x_1,...,x_N) with 0-based types maps to
// x_1 e^(N-1) + x_2 e^(N-2) + ... + x_N.
template <typename S>
struct DistVec {
    int particles = 0;
    int types = 0;
    std::vector<S> weights;

    static std::size_t space_size(int particles, int types, std::size_t guard) {
        std::size_t dim = 1;
        for (int i = 0; i < particles; ++i) {
            if (dim > guard / static_cast<std::size_t>(types))
                throw std::invalid_argument("DistVec: |E|^N exceeds guard");
            dim *= static_cast<std::size_t>(types);
        }
        return dim;
    }

    static DistVec zero(int particles, int types, std::size_t guard = 100'000) {
        DistVec d;
        d.particles = particles;
        d.types = types;
        d.weights.assign(space_size(particles, types, guard), S(0));
        return d;
    }

    std::size_t index_of(const std::vector<int>& pop) const {
        std::size_t idx = 0;
        for (int v : pop) idx = idx * static_cast<std::size_t>(types) + static_cast<std::size_t>(v);
        return idx;
    }

    std::vector<int> population_at(std::size_t idx) const {
        std::vector<int> pop(static_cast<std::size_t>(particles));
        for (int i = particles - 1; i >= 0; --i) {
            pop[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(types));
            idx /= static_cast<std::size_t>(types);
        }
        return pop;
    }

    S total_mass() const {
        S sum = S(0);
        for (const auto& w : weights) sum += w;
        return sum;
    }
};

// eta^(x)N, the product measure of N independent eta-distributed types.
template <typename S>
DistVec<S> iid_product(const std::vector<S>& eta, int particles, std::size_t guard = 100'000) {
    auto out = DistVec<S>::zero(particles, static_cast<int>(eta.size()), guard);
    for (std::size_t idx = 0; idx < out.weights.size(); ++idx) {
        S w = S(1);
        std::size_t rem = idx;
        for (int i = 0; i < particles; ++i) {
            w *= eta[rem % eta.size()];
            rem /= eta.size();
        }
        out.weights[idx] = w;
    }
    return out;
}

// The averaged selection operator D: out = sum_x dist(x) m(x)^(x)N. Grouping
// by empirical type counts keeps this quadratic in the number of count
// classes rather than in |E|^N.
template <typename S>
DistVec<S> apply_selection_average(const DistVec<S>& dist) {
    const int n = dist.particles, e = dist.types;
    auto out = DistVec<S>::zero(n, e);
    // class id for every population
    std::map<std::vector<int>, int> class_ids;
    std::vector<std::vector<int>> classes;
    std::vector<int> class_of(dist.weights.size());
    for (std::size_t idx = 0; idx < dist.weights.size(); ++idx) {
        std::vector<int> counts(static_cast<std::size_t>(e), 0);
        std::size_t rem = idx;
        for (int i = 0; i < n; ++i) {
            ++counts[rem % static_cast<std::size_t>(e)];
            rem /= static_cast<std::size_t>(e);
        }
        auto [it, inserted] = class_ids.try_emplace(counts, static_cast<int>(classes.size()));
        if (inserted) classes.push_back(counts);
        class_of[idx] = it->second;
    }
    std::vector<S> mass(classes.size(), S(0));
    for (std::size_t idx = 0; idx < dist.weights.size(); ++idx)
        mass[static_cast<std::size_t>(class_of[idx])] += dist.weights[idx];
    // table[src][dst] = prod_t (src_t/N)^(dst_t)
    std::vector<std::vector<S>> table(classes.size(), std::vector<S>(classes.size(), S(0)));
    for (std::size_t src = 0; src < classes.size(); ++src) {
        if (mass[src] == S(0)) continue;
        for (std::size_t dst = 0; dst < classes.size(); ++dst) {
            S v = S(1);
            bool ok = true;
            for (int t = 0; t < e && ok; ++t) {
                const int k = classes[dst][static_cast<std::size_t>(t)];
                if (k == 0) continue;
                if (classes[src][static_cast<std::size_t>(t)] == 0) {
                    ok = false;
                    break;
                }
                S r = detail::ratio_as<S>(classes[src][static_cast<std::size_t>(t)], n);
                for (int rep = 0; rep < k; ++rep) v *= r;
            }
            table[src][dst] = ok ? v : S(0);
        }
    }
    for (std::size_t idx = 0; idx < out.weights.size(); ++idx) {
        S acc = S(0);
        for (std::size_t src = 0; src < classes.size(); ++src)
            if (mass[src] != S(0)) acc += mass[src] * table[src][static_cast<std::size_t>(class_of[idx])];
        out.weights[idx] = acc;
    }
    return out;
}

// M^(x)N: independent per-coordinate kernel application.
template <typename S>
DistVec<S> apply_mutation_tensor(const DistVec<S>& dist, const MutationKernel<S>& kernel) {
    const int n = dist.particles, e = dist.types;
    if (kernel.type_count() != e) throw std::invalid_argument("apply_mutation_tensor: type space mismatch");
    std::vector<S> cur = dist.weights;
    std::vector<S> next(cur.size());
    std::size_t stride = cur.size() / static_cast<std::size_t>(e);  // stride of coordinate 0
    for (int axis = 0; axis < n; ++axis) {
        std::fill(next.begin(), next.end(), S(0));
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            if (cur[idx] == S(0)) continue;
            const std::size_t digit = (idx / stride) % static_cast<std::size_t>(e);
            const std::size_t base = idx - digit * stride;
            for (std::size_t to = 0; to < static_cast<std::size_t>(e); ++to) {
                const S& m = kernel.rows[digit][to];
                if (m != S(0)) next[base + to * stride] += cur[idx] * m;
            }
        }
        cur.swap(next);
        stride /= static_cast<std::size_t>(e);
    }
    DistVec<S> out;
    out.particles = n;
    out.types = e;
    out.weights = std::move(cur);
    return out;
}

// Pushforward by the deterministic selection D_a.
template <typename S>
DistVec<S> apply_parent_map(const DistVec<S>& dist, const ParentMap& a) {
    if (a.size() != dist.particles) throw std::invalid_argument("apply_parent_map: size mismatch");
    auto out = DistVec<S>::zero(dist.particles, dist.types);
    const int n = dist.particles;
    for (std::size_t idx = 0; idx < dist.weights.size(); ++idx) {
        if (dist.weights[idx] == S(0)) continue;
        auto pop = dist.population_at(idx);
        std::vector<int> moved(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) moved[static_cast<std::size_t>(i)] = pop[static_cast<std::size_t>(a(i))];
        out.weights[out.index_of(moved)] += dist.weights[idx];
    }
    return out;
}

// The paper's total-variation norm: sup_{|F| <= 1} |p(F) - q(F)| =
// sum_x |p(x) - q(x)| (twice the conventional distance).
template <typename S>
S tv_distance(const DistVec<S>& p, const DistVec<S>& q) {
    if (p.particles != q.particles || p.types != q.types)
        throw std::invalid_argument("tv_distance: mismatched spaces");
    S sum = S(0);
    for (std::size_t idx = 0; idx < p.weights.size(); ++idx)
        sum += detail::scalar_abs(p.weights[idx] - q.weights[idx]);
    return sum;
}

// Average over all coordinate permutations. Factorial cost; guarded.
template <typename S>
DistVec<S> symmetrize(const DistVec<S>& dist, int max_particles = 8) {
    const int n = dist.particles;
    if (n > max_particles) throw std::invalid_argument("symmetrize: N too large");
    auto out = DistVec<S>::zero(n, dist.types);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    long nfact = 1;
    for (int i = 2; i <= n; ++i) nfact *= i;
    const S inv = detail::ratio_as<S>(1, nfact);
    do {
        for (std::size_t idx = 0; idx < dist.weights.size(); ++idx) {
            if (dist.weights[idx] == S(0)) continue;
            auto pop = dist.population_at(idx);
            std::vector<int> moved(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) moved[static_cast<std::size_t>(i)] = pop[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
            out.weights[out.index_of(moved)] += dist.weights[idx] * inv;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

// The exact distribution flow: gamma_n (before selection) and gamma_hat_n
// (after selection), advanced by gamma_{n+1} = gamma_hat_n M^(x)N and
// gamma_hat_n = gamma_n D.
template <typename S>
class FlowIterator {
  public:
    FlowIterator(MutationKernel<S> kernel, const std::vector<S>& eta, int particles,
                 std::size_t guard = 100'000)
        : kernel_(std::move(kernel)), gamma_(iid_product(eta, particles, guard)) {
        kernel_.validate();
        gamma_hat_ = apply_selection_average(gamma_);
    }

    int step() const { return step_; }
    const DistVec<S>& gamma() const { return gamma_; }
    const DistVec<S>& gamma_hat() const { return gamma_hat_; }

    void advance() {
        gamma_ = apply_mutation_tensor(gamma_hat_, kernel_);
        gamma_hat_ = apply_selection_average(gamma_);
        ++step_;
    }

  private:
    MutationKernel<S> kernel_;
    DistVec<S> gamma_;
    DistVec<S> gamma_hat_;
    int step_ = 0;
};

template <typename S>
std::pair<DistVec<S>, DistVec<S>> exact_flow(const MutationKernel<S>& kernel, const std::vector<S>& eta,
                                             int particles, int steps) {
    FlowIterator<S> it(kernel, eta, particles);
    for (int k = 0; k < steps; ++k) it.advance();
    return {it.gamma(), it.gamma_hat()};
}

// The law of the N-tuple read along a genealogy: roots (the image of the last
// map) are i.i.d. eta, every edge applies the kernel, coordinate i reads the
// leaf at b_0(i). The sequence must be weakly decreasing (b_{p+1} <= b_p).
template <typename S>
DistVec<S> genealogy_measure(const MutationKernel<S>& kernel, const std::vector<S>& eta,
                             const std::vector<ParentMap>& maps, std::size_t guard = 100'000) {
    if (maps.empty()) throw std::invalid_argument("genealogy_measure: empty sequence");
    const int n_pop = maps[0].size();
    const int e = kernel.type_count();
    if (static_cast<int>(eta.size()) != e) throw std::invalid_argument("genealogy_measure: eta size");
    for (std::size_t p = 0; p + 1 < maps.size(); ++p)
        if (!leq(maps[p + 1], maps[p]))
            throw std::invalid_argument("genealogy_measure: sequence not weakly decreasing");
    (void)DistVec<S>::space_size(n_pop, e, guard);

    // levels root -> leaves: m_p = maps[n - p]
    const int depth = static_cast<int>(maps.size()) - 1;
    auto level_map = [&](int p) -> const ParentMap& { return maps[static_cast<std::size_t>(depth - p)]; };

    // frontier: joint law over the current level's distinct vertices
    std::vector<int> frontier = level_map(0).image();
    std::vector<S> weights(DistVec<S>::space_size(static_cast<int>(frontier.size()), e, guard), S(0));
    for (std::size_t idx = 0; idx < weights.size(); ++idx) {
        S w = S(1);
        std::size_t rem = idx;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            w *= eta[rem % static_cast<std::size_t>(e)];
            rem /= static_cast<std::size_t>(e);
        }
        weights[idx] = w;
    }

    for (int p = 0; p + 1 <= depth; ++p) {
        const ParentMap& fine = level_map(p + 1);
        const ParentMap& coarse = level_map(p);
        std::vector<int> next_frontier = fine.image();
        // parent vertex (value of coarse) for each fine vertex
        std::vector<int> parent_of(static_cast<std::size_t>(n_pop), -1);
        for (int i = 0; i < n_pop; ++i) {
            int v = fine(i);
            if (parent_of[static_cast<std::size_t>(v)] == -1) parent_of[static_cast<std::size_t>(v)] = coarse(i);
        }
        // replace each frontier vertex by its children, one vertex at a time
        for (std::size_t pos = 0; pos < frontier.size();) {
            const int u = frontier[pos];
            std::vector<int> children;
            for (int v : next_frontier)
                if (parent_of[static_cast<std::size_t>(v)] == u) children.push_back(v);
            if (children.empty())
                throw std::logic_error("genealogy_measure: parent without descendants");
            const std::size_t k = children.size();
            const std::size_t len = frontier.size();
            std::size_t new_len_dim = 1;
            for (std::size_t i = 0; i < len - 1 + k; ++i) {
                if (new_len_dim > guard / static_cast<std::size_t>(e))
                    throw std::invalid_argument("genealogy_measure: frontier exceeds guard");
                new_len_dim *= static_cast<std::size_t>(e);
            }
            std::vector<S> next_weights(new_len_dim, S(0));
            std::size_t combos = 1;
            for (std::size_t i = 0; i < k; ++i) combos *= static_cast<std::size_t>(e);
            std::vector<std::size_t> digits(len);
            for (std::size_t idx = 0; idx < weights.size(); ++idx) {
                if (weights[idx] == S(0)) continue;
                std::size_t rem = idx;
                for (std::size_t i = len; i-- > 0;) {
                    digits[i] = rem % static_cast<std::size_t>(e);
                    rem /= static_cast<std::size_t>(e);
                }
                const std::size_t parent_val = digits[pos];
                for (std::size_t c = 0; c < combos; ++c) {
                    S w = weights[idx];
                    std::size_t crem = c;
                    std::size_t new_idx = 0;
                    // digits before pos
                    for (std::size_t i = 0; i < pos; ++i) new_idx = new_idx * e + digits[i];
                    bool zero = false;
                    std::vector<std::size_t> child_digits(k);
                    for (std::size_t j = k; j-- > 0;) {
                        child_digits[j] = crem % static_cast<std::size_t>(e);
                        crem /= static_cast<std::size_t>(e);
                    }
                    for (std::size_t j = 0; j < k; ++j) {
                        const S& m = kernel.rows[parent_val][child_digits[j]];
                        if (m == S(0)) {
                            zero = true;
                            break;
                        }
                        w *= m;
                        new_idx = new_idx * e + child_digits[j];
                    }
                    if (zero) continue;
                    for (std::size_t i = pos + 1; i < len; ++i) new_idx = new_idx * e + digits[i];
                    next_weights[new_idx] += w;
                }
            }
            // frontier update: children take the parent's slot
            std::vector<int> updated;
            updated.reserve(len - 1 + k);
            for (std::size_t i = 0; i < pos; ++i) updated.push_back(frontier[i]);
            for (int v : children) updated.push_back(v);
            for (std::size_t i = pos + 1; i < len; ++i) updated.push_back(frontier[i]);
            frontier = std::move(updated);
            weights = std::move(next_weights);
            pos += k;
        }
    }

    // read off coordinates: coordinate i takes the leaf at b_0(i)
    const ParentMap& leaf_map = maps[0];
    std::vector<int> slot_of(static_cast<std::size_t>(n_pop), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot_of[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
    auto out = DistVec<S>::zero(n_pop, e, guard);
    std::vector<std::size_t> digits(frontier.size());
    for (std::size_t idx = 0; idx < weights.size(); ++idx) {
        if (weights[idx] == S(0)) continue;
        std::size_t rem = idx;
        for (std::size_t i = frontier.size(); i-- > 0;) {
            digits[i] = rem % static_cast<std::size_t>(e);
            rem /= static_cast<std::size_t>(e);
        }
        std::size_t out_idx = 0;
        for (int i = 0; i < n_pop; ++i)
            out_idx = out_idx * static_cast<std::size_t>(e) + digits[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(leaf_map(i))])];
        out.weights[out_idx] += weights[idx];
    }
    return out;
}

// --- Monte Carlo path ---

// One Wright-Fisher selection step: records the sampled parent map.
std::pair<Population, ParentMap> selection_step(const Population& x, Rng& rng);

// Independent per-coordinate mutation; values must lie in the kernel's space.
Population mutation_step(const Population& x, const MutationKernel<double>& kernel, Rng& rng);

// --- double-only analysis helpers (definitions in flows.cpp) ---

// beta(M^steps) under the paper's norm: worst-case row distance of the
// steps-fold power.
double dobrushin(const MutationKernel<double>& kernel, int steps);

struct MixingParameters {
    double delta = 2.0;
    double lambda = 0.0;  // +inf for rank-one kernels
    bool rank_one = false;
};

// (delta, lambda) = (2, -log(beta(M)/2)); valid for every n by
// submultiplicativity of beta/2. Throws when beta(M)/2 >= 1.
MixingParameters fit_mixing_parameters(const MutationKernel<double>& kernel);

// Stationary law of the post-selection chain (kernel M D). Uniqueness is
// pre-checked through the closed classes of the count-level support graph;
// degenerate kernels are rejected with a diagnostic.
DistVec<double> exact_stationary(const MutationKernel<double>& kernel, int particles);

}  // namespace wfcoal
