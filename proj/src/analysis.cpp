#include "wfcoal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wfcoal/stats.hpp"

namespace wfcoal {

namespace {

double big_ratio_to_double(const BigInt& num, const BigInt& den) {
    mpf_class n(num, 128), d(den, 128);
    mpf_class q = n / d;
    return q.get_d();
}

std::vector<TailCheckRow> tail_rows_for(int n, const BigInt& eps_num, const BigInt& eps_den) {
    std::vector<TailCheckRow> rows;
    auto matrix = block_transition_matrix(n);
    stream_survival(matrix, n, [&](long k, const BigInt& num, const BigInt& den) {
        // stop once the exact tail drops below eps: num/den < eps_num/eps_den
        if (num * eps_den < eps_num * den) return false;
        TailCheckRow row;
        row.n = n;
        row.k = k;
        row.tail = big_ratio_to_double(num, den);
        row.bound = tail_bound(n, k);
        row.ok = row.tail <= row.bound;
        rows.push_back(row);
        return true;
    });
    return rows;
}

}  // namespace

TailCheckReport verify_theorem1(const std::vector<int>& n_list, double eps) {
    if (eps <= 0) throw std::invalid_argument("verify_theorem1: eps <= 0");
    Rat eps_rat(eps);
    const BigInt eps_num = eps_rat.get_num();
    const BigInt eps_den = eps_rat.get_den();

    std::vector<std::future<std::vector<TailCheckRow>>> futures;
    for (int n : n_list)
        futures.push_back(std::async(std::launch::async, tail_rows_for, n, eps_num, eps_den));
    TailCheckReport report;
    for (auto& f : futures) {
        auto rows = f.get();
        for (auto& r : rows) {
            report.all_ok = report.all_ok && r.ok;
            report.rows.push_back(std::move(r));
        }
    }
    return report;
}

namespace {

struct MrcaLaw {
    std::vector<double> pmf;       // P(T = k)
    std::vector<double> survival;  // P(T > k) at index k
};

// T = (S-1)_+ for the chain started at N.
MrcaLaw mrca_law(int n, int max_horizon) {
    auto law = absorption_law(block_transition_matrix(n), n, make_rat(1, big_pow(10, 18)));
    MrcaLaw out;
    auto pmf = law.mrca_pmf();
    for (const auto& p : pmf) out.pmf.push_back(to_double(p));
    for (int k = 0; k <= max_horizon; ++k) {
        const std::size_t s_index = static_cast<std::size_t>(k) + 2;  // P(T > k) = P(S >= k+2)
        if (s_index < law.survival.size())
            out.survival.push_back(to_double(law.survival[s_index]));
        else
            out.survival.push_back(to_double(law.tail));
    }
    while (static_cast<int>(out.pmf.size()) <= max_horizon) out.pmf.push_back(0.0);
    return out;
}

}  // namespace

DecayReport compute_decay_report(const MutationKernel<double>& kernel, const std::vector<double>& eta,
                                 int n_particles, const std::vector<int>& horizons, double kprime) {
    if (horizons.empty()) throw std::invalid_argument("compute_decay_report: no horizons");
    DecayReport report;
    report.mixing = fit_mixing_parameters(kernel);
    report.kprime = kprime > 0 ? kprime : kprime_default();
    const double delta = report.mixing.delta;
    const double lambda = report.mixing.lambda;
    const double dn = static_cast<double>(n_particles);

    auto stationary = exact_stationary(kernel, n_particles);
    const int max_h = *std::max_element(horizons.begin(), horizons.end());
    auto t_law = mrca_law(n_particles, max_h);

    std::vector<double> tv_at(static_cast<std::size_t>(max_h) + 1, 0.0);
    FlowIterator<double> flow(kernel, eta, n_particles);
    for (int n = 0; n <= max_h; ++n) {
        tv_at[static_cast<std::size_t>(n)] = tv_distance(flow.gamma_hat(), stationary);
        if (n < max_h) flow.advance();
    }

    const double validity_edge = dn + (std::isinf(lambda) ? 0.0 : 1.0 / lambda);
    report.min_valid_kprime = 0;
    for (int n : horizons) {
        DecayRecord rec;
        rec.n = n;
        rec.exact_tv = tv_at[static_cast<std::size_t>(n)];
        rec.tail_prob = t_law.survival[static_cast<std::size_t>(n)];
        double mixing_term = 0;
        if (std::isinf(lambda)) {
            mixing_term = t_law.pmf[static_cast<std::size_t>(n)];  // e^{-inf (n-T)} 1_{T<=n} = 1_{T=n}
        } else {
            for (int k = 0; k <= n; ++k)
                mixing_term += t_law.pmf[static_cast<std::size_t>(k)] * std::exp(-lambda * static_cast<double>(n - k));
        }
        rec.inter_bound = delta * mixing_term + 2.0 * rec.tail_prob;
        rec.ok = rec.exact_tv <= rec.inter_bound + 1e-10;
        report.inter_ok = report.inter_ok && rec.ok;
        if (static_cast<double>(n) >= validity_edge) {
            const double shape = delta * (static_cast<double>(n) / dn) *
                                 std::exp(-static_cast<double>(n) / validity_edge);
            rec.theo2_bound = report.kprime * shape;
            if (shape > 0) report.min_valid_kprime = std::max(report.min_valid_kprime, rec.exact_tv / shape);
        } else {
            rec.theo2_bound = std::numeric_limits<double>::quiet_NaN();
        }
        report.records.push_back(rec);
    }

    // fitted decay rate over the tail half of the window (underflowed TVs dropped)
    std::vector<double> xs, ys;
    const std::size_t start = report.records.size() / 2;
    for (std::size_t idx = start; idx < report.records.size(); ++idx) {
        const auto& rec = report.records[idx];
        if (rec.exact_tv > 1e-290) {
            xs.push_back(static_cast<double>(rec.n));
            ys.push_back(-std::log(rec.exact_tv));
        }
    }
    report.fitted_rate = xs.size() >= 2 ? ls_slope(xs, ys) : std::numeric_limits<double>::infinity();
    return report;
}

LyapunovResult lyapunov_estimate(const MutationKernel<double>& kernel, const std::vector<double>& eta,
                                 int n_particles, const std::vector<int>& horizons) {
    auto report = compute_decay_report(kernel, eta, n_particles, horizons);
    LyapunovResult out;
    const double lambda = report.mixing.lambda;
    const double dn = static_cast<double>(n_particles);
    const double rate_bound = std::isinf(lambda) ? 1.0 / dn : lambda / (lambda * dn + 1.0);
    out.bound = std::min(rate_bound, 1.0 / dn);

    std::vector<double> xs, ys;
    const std::size_t start = report.records.size() / 2;
    bool dropped = false;
    for (std::size_t idx = start; idx < report.records.size(); ++idx) {
        const auto& rec = report.records[idx];
        if (rec.exact_tv > 1e-290) {
            xs.push_back(static_cast<double>(rec.n));
            ys.push_back(-std::log(rec.exact_tv));
        } else {
            dropped = true;
        }
    }
    out.window_shrunk = dropped;
    out.points_used = static_cast<int>(xs.size());
    out.slope = xs.size() >= 2 ? ls_slope(xs, ys) : std::numeric_limits<double>::infinity();
    out.pass = out.slope >= out.bound - 1e-6;
    return out;
}

}  // namespace wfcoal
