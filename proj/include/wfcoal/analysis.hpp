#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wfcoal/block_chain.hpp"
#include "wfcoal/flows.hpp"

namespace wfcoal {

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string kernel_path;
    std::string eta_path;
    int n_particles = 2;
    std::vector<int> horizons;
    double eps = 1e-8;
    std::vector<double> alpha_grid;
    std::string output_format = "csv";  // csv | json
    std::string output_path;
};

// --- absorption-tail verification (exact tails against the K (n/N v 1) e^-()
// bound, K = 3e) ---

struct TailCheckRow {
    int n = 0;
    long k = 0;
    double tail = 0;  // exact survival P(S >= k), rounded for reporting
    double bound = 0;
    bool ok = true;
};

struct TailCheckReport {
    std::vector<TailCheckRow> rows;
    bool all_ok = true;
};

// Checks every k with exact tail >= eps for each population size; exact
// survival values are streamed as raw integer pairs. Work is spread across
// hardware threads (one task per population size).
TailCheckReport verify_theorem1(const std::vector<int>& n_list, double eps);

// --- TV-decay experiments ---

struct DecayRecord {
    int n = 0;
    double exact_tv = 0;
    double inter_bound = 0;
    double theo2_bound = 0;  // NaN below the validity edge n >= N + 1/lambda
    double tail_prob = 0;    // P(T > n)
    bool ok = true;          // exact_tv <= inter_bound (+ float tolerance)
};

struct DecayReport {
    std::vector<DecayRecord> records;
    MixingParameters mixing;
    double kprime = 0;
    double min_valid_kprime = 0;
    double fitted_rate = 0;
    bool inter_ok = true;
};

// Exact ||gamma_hat_{eta,n} - gamma_hat_mu|| per horizon against the
// conditional-mixing bound delta E[e^{-lambda(n-T)} 1_{T<=n}] + 2 P(T > n),
// plus the corollary-shaped bound with the supplied kprime (0 picks the
// default e^2(1+3e)).
DecayReport compute_decay_report(const MutationKernel<double>& kernel, const std::vector<double>& eta,
                                 int n_particles, const std::vector<int>& horizons, double kprime = 0);

struct LyapunovResult {
    double slope = 0;
    double bound = 0;  // (lambda/(lambda N + 1)) ^ (1/N)
    bool pass = false;
    bool window_shrunk = false;
    int points_used = 0;
};

// Least-squares slope of -log TV over the tail half of the horizon window;
// horizons where TV underflows are dropped (window shrinks with a flag).
LyapunovResult lyapunov_estimate(const MutationKernel<double>& kernel, const std::vector<double>& eta,
                                 int n_particles, const std::vector<int>& horizons);

}  // namespace wfcoal
