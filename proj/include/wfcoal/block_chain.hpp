#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wfcoal/rational.hpp"
#include "wfcoal/rng.hpp"

namespace wfcoal {

// S(q, p), Stirling number of the second kind. p > q gives 0; negative input
// throws.
BigInt stirling2(long q, long p);

// Lower-triangular transition matrix of the block-count chain, exact
// rationals. rows[q-1] holds entries for p = 1..q.
struct BlockMatrix {
    int n = 0;
    std::vector<std::vector<Rat>> rows;
    const Rat& entry(int q, int p) const { return rows[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(p - 1)]; }
};

// Same shape in doubles; usable far beyond the exact range (the entries are
// built by a stable in-[0,1] recurrence, not via log Stirling tables).
struct BlockMatrixD {
    int n = 0;
    std::vector<std::vector<double>> rows;
    double entry(int q, int p) const { return rows[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(p - 1)]; }
};

// M^(N): entry(q,p) = S(q,p) (N)_p / N^q.
BlockMatrix block_transition_matrix(int n);
BlockMatrixD block_transition_matrix_double(int n);

// The single-jump comparison chain: stays with (N)_q / N^q, otherwise steps
// down by exactly one.
BlockMatrix single_jump_matrix(int n);
BlockMatrixD single_jump_matrix_double(int n);

// Law of the absorption time S (first hit of state 1) for a chain started at
// i: pmf[k] = P(S = k), survival[k] = P(S >= k), tail = P(S > horizon).
// mrca_pmf() is the law of (S-1)_+, the time to most recent common ancestor
// when the backward chain starts from a uniform map instead of Id.
struct AbsorptionLaw {
    int n = 0, i = 0;
    std::vector<Rat> pmf;
    std::vector<Rat> survival;
    Rat tail;
    std::vector<Rat> mrca_pmf() const;
};

struct AbsorptionLawD {
    int n = 0, i = 0;
    std::vector<double> pmf;
    std::vector<double> survival;
    double tail = 0;
    std::vector<double> mrca_pmf() const;
};

// Iterates the restricted chain until the residual mass drops below eps
// (hard cap on the step count; the residual is kept in `tail`, never
// dropped).
AbsorptionLaw absorption_law(const BlockMatrix& m, int i, const Rat& eps,
                             long max_steps = 10'000'000);
AbsorptionLawD absorption_law(const BlockMatrixD& m, int i, double eps,
                              long max_steps = 10'000'000);

AbsorptionLaw absorption_distribution(int n, int i, double eps);
AbsorptionLawD absorption_distribution_double(int n, int i, double eps);

// Streams P(S >= k) as raw integer pairs num/den for k = 0, 1, 2, ... without
// normalizing; far cheaper than materializing an AbsorptionLaw when only the
// exact survival values are needed. The visitor returns false to stop.
void stream_survival(const BlockMatrix& m, int i,
                     const std::function<bool(long k, const BigInt& num, const BigInt& den)>& visit,
                     long max_steps = 10'000'000);

// E[S^(N,i)] in closed form from the fundamental system (back-substitution
// over the triangular matrix); exact for any i <= n.
Rat mean_absorption_time(int n, int i);

// E[R_n - R_{n+1} | R_n = q] = q - N + N (1 - 1/N)^q, exact.
Rat expected_decrease(int n, int q);

// g(s) = s - N + N (1 - 1/N)^s, the drift function (real s >= 1).
double g_drift(int n, double s);

// P(R_{k+1} <= q - 2 | R_k = q), exact, from the matrix complement.
Rat jump_two_probability(int n, int q);

// E[tau_j^(N,N)], the expected number of steps until the chain started at N
// drops below j; exact. ratio = E * j / N (the Lemma-shape normalization).
struct HittingTime {
    Rat expected;
    double ratio = 0;
};
HittingTime expected_hitting_time(int n, int j);

// P(R_{tau_j} <= j/2) for the chain started at N, exact.
Rat overshoot_probability(int n, int j);

// K (n/N v 1) exp(-(n/N - 1)_+) with K = 3e (the telescoped value of the
// infinite product).
double theo1_constant();
double tail_bound(int n, long k);

// Default K' for the corollary-shaped bound: e^2 (1 + 3e).
double kprime_default();

// E[exp(alpha S^(N,i) / N)], bracketed: `lower` is the partial sum over the
// computed horizon, `upper` adds a rigorous remainder bound obtained by
// dominating the leftover time by the single-jump chain.
struct LaplaceBracket {
    double lower = 0, upper = 0;
};
LaplaceBracket laplace_exact(int n, int i, double alpha);

// Closed form E[exp(alpha Stilde^(N,i) / N)]; finite for 0 <= alpha < 1.
double single_jump_laplace_closed_form(int n, int i, double alpha);

// Pi(alpha), truncated so the logarithmic remainder is below tol. The
// truncation always under-estimates (every omitted factor exceeds 1).
double limit_law_laplace(double alpha, double tol);

// One draw of sum_{l<trunc} 2/((l+1)(l+2)) E_l plus the deterministic mean
// 2/(trunc+1) of the omitted tail.
double sample_limit_law(Rng& rng, int trunc);

// Per-row cumulative tables for fast repeated sampling of the chain.
class BlockChainSampler {
  public:
    explicit BlockChainSampler(const BlockMatrixD& m);
    // One draw of S^(N,i): steps until the chain started at i hits 1.
    long sample_absorption_time(int i, Rng& rng) const;

  private:
    int n_;
    std::vector<std::vector<double>> cumulative_;
};

// Exact E[exp(-lambda (k - S)) 1_{S <= k}] for the chain started at n, and
// the corollary-shaped bound with the supplied kprime.
struct CorollaryCheck {
    double exact = 0, bound = 0;
};
CorollaryCheck corollary_bound(int n, long k, double lambda, double kprime);

// Exact pmf of Stilde^(N,i) on [0, horizon] via the geometric-sum
// decomposition (independent summands, one per level), as a convolution.
std::vector<Rat> single_jump_pmf_geometric(int n, int i, int horizon);

// Cross-checks the single-jump decomposition: matrix-power pmf equals the
// geometric convolution exactly, and the Laplace transform of
// (Stilde - i + 1)/N matches the closed-form product.
struct FixedIReport {
    bool pmf_match = true;
    double laplace_max_err = 0;
};
FixedIReport fixed_i_limit_check(int i, const std::vector<int>& n_list);

}  // namespace wfcoal
