#include "wfcoal/block_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace wfcoal {

namespace {

// S(q,p) for all 0 <= p <= q <= n.
std::vector<std::vector<BigInt>> stirling_table(int n) {
    std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(n) + 1);
    s[0] = {BigInt(1)};
    for (int q = 1; q <= n; ++q) {
        s[static_cast<std::size_t>(q)].assign(static_cast<std::size_t>(q) + 1, BigInt(0));
        for (int p = 1; p <= q; ++p) {
            BigInt v = s[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(p - 1)];
            if (p < q) v += p * s[static_cast<std::size_t>(q - 1)][static_cast<std::size_t>(p)];
            s[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = v;
        }
    }
    return s;
}

void check_state(int n, int i, const char* who) {
    if (n < 1 || i < 1 || i > n) throw std::invalid_argument(std::string(who) + ": need 1 <= i <= n");
}

}  // namespace

BigInt stirling2(long q, long p) {
    if (q < 0 || p < 0) throw std::invalid_argument("stirling2: negative input");
    if (p > q) return 0;
    if (q == 0) return 1;  // S(0,0)
    // one row at a time, O(q p) time, O(p) space
    std::vector<BigInt> row(static_cast<std::size_t>(p) + 1, BigInt(0));
    row[0] = 1;  // S(0,0)
    for (long qq = 1; qq <= q; ++qq) {
        for (long pp = std::min(qq, p); pp >= 1; --pp)
            row[static_cast<std::size_t>(pp)] =
                pp * row[static_cast<std::size_t>(pp)] + row[static_cast<std::size_t>(pp - 1)];
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(p)];
}

BlockMatrix block_transition_matrix(int n) {
    if (n < 1) throw std::invalid_argument("block_transition_matrix: n < 1");
    auto s = stirling_table(n);
    std::vector<BigInt> ff(static_cast<std::size_t>(n) + 1);
    ff[0] = 1;
    for (int p = 1; p <= n; ++p) ff[static_cast<std::size_t>(p)] = ff[static_cast<std::size_t>(p - 1)] * (n - p + 1);
    BlockMatrix m;
    m.n = n;
    m.rows.resize(static_cast<std::size_t>(n));
    BigInt npow = 1;
    for (int q = 1; q <= n; ++q) {
        npow *= n;
        auto& row = m.rows[static_cast<std::size_t>(q - 1)];
        row.reserve(static_cast<std::size_t>(q));
        for (int p = 1; p <= q; ++p)
            row.push_back(make_rat(s[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] * ff[static_cast<std::size_t>(p)], npow));
    }
    return m;
}

BlockMatrixD block_transition_matrix_double(int n) {
    if (n < 1) throw std::invalid_argument("block_transition_matrix_double: n < 1");
    BlockMatrixD m;
    m.n = n;
    m.rows.resize(static_cast<std::size_t>(n));
    m.rows[0] = {1.0};
    const double dn = static_cast<double>(n);
    // row recurrence: m[q+1][p] = (p/N) m[q][p] + ((N-p+1)/N) m[q][p-1];
    // every coefficient sits in [0,1], so no rescaling is needed
    for (int q = 2; q <= n; ++q) {
        const auto& prev = m.rows[static_cast<std::size_t>(q - 2)];
        auto& row = m.rows[static_cast<std::size_t>(q - 1)];
        row.assign(static_cast<std::size_t>(q), 0.0);
        for (int p = 1; p <= q; ++p) {
            double v = 0;
            if (p <= q - 1) v += (static_cast<double>(p) / dn) * prev[static_cast<std::size_t>(p - 1)];
            if (p >= 2 && p - 2 < q - 1)
                v += ((dn - static_cast<double>(p) + 1.0) / dn) * prev[static_cast<std::size_t>(p - 2)];
            row[static_cast<std::size_t>(p - 1)] = v;
        }
    }
    return m;
}

BlockMatrix single_jump_matrix(int n) {
    if (n < 1) throw std::invalid_argument("single_jump_matrix: n < 1");
    BlockMatrix m;
    m.n = n;
    m.rows.resize(static_cast<std::size_t>(n));
    BigInt npow = 1;
    for (int q = 1; q <= n; ++q) {
        npow *= n;
        Rat stay = make_rat(falling_factorial(n, q), npow);
        auto& row = m.rows[static_cast<std::size_t>(q - 1)];
        row.assign(static_cast<std::size_t>(q), Rat(0));
        row[static_cast<std::size_t>(q - 1)] = stay;
        if (q >= 2) row[static_cast<std::size_t>(q - 2)] = Rat(1) - stay;
    }
    return m;
}

BlockMatrixD single_jump_matrix_double(int n) {
    auto exact = single_jump_matrix(n);
    BlockMatrixD m;
    m.n = n;
    m.rows.resize(static_cast<std::size_t>(n));
    for (int q = 1; q <= n; ++q) {
        auto& row = m.rows[static_cast<std::size_t>(q - 1)];
        row.assign(static_cast<std::size_t>(q), 0.0);
        for (int p = 1; p <= q; ++p) row[static_cast<std::size_t>(p - 1)] = to_double(exact.entry(q, p));
    }
    return m;
}

std::vector<Rat> AbsorptionLaw::mrca_pmf() const {
    if (i == 1) return {Rat(1)};
    std::vector<Rat> out;
    if (pmf.size() >= 2) {
        out.push_back(pmf[0] + pmf[1]);
        for (std::size_t k = 2; k < pmf.size(); ++k) out.push_back(pmf[k]);
    } else if (!pmf.empty()) {
        out.push_back(pmf[0]);
    }
    return out;
}

std::vector<double> AbsorptionLawD::mrca_pmf() const {
    if (i == 1) return {1.0};
    std::vector<double> out;
    if (pmf.size() >= 2) {
        out.push_back(pmf[0] + pmf[1]);
        for (std::size_t k = 2; k < pmf.size(); ++k) out.push_back(pmf[k]);
    } else if (!pmf.empty()) {
        out.push_back(pmf[0]);
    }
    return out;
}

AbsorptionLaw absorption_law(const BlockMatrix& m, int i, const Rat& eps, long max_steps) {
    check_state(m.n, i, "absorption_law");
    if (eps < 0) throw std::invalid_argument("absorption_law: eps < 0");
    const int n = m.n;
    AbsorptionLaw law;
    law.n = n;
    law.i = i;
    law.survival.push_back(Rat(1));
    if (i == 1) {
        law.pmf.push_back(Rat(1));
        law.tail = 0;
        law.survival.push_back(Rat(0));
        return law;
    }
    law.pmf.push_back(Rat(0));  // P(S = 0) = 0 for i >= 2
    law.survival.push_back(Rat(1));

    // Scaled-integer iteration: v[q] = P(R_k = q, S > k) * den with
    // den = N^(k n); W[q][p] = M[q][p] * N^n is integral.
    BigInt nn = big_pow(n, static_cast<unsigned long>(n));
    std::vector<std::vector<BigInt>> w(static_cast<std::size_t>(n) + 1);
    for (int q = 2; q <= n; ++q) {
        auto& row = w[static_cast<std::size_t>(q)];
        row.assign(static_cast<std::size_t>(q) + 1, BigInt(0));
        for (int p = 1; p <= q; ++p) {
            const Rat& e = m.entry(q, p);
            row[static_cast<std::size_t>(p)] = e.get_num() * (nn / e.get_den());
        }
    }
    std::vector<BigInt> v(static_cast<std::size_t>(n) + 1, BigInt(0));
    v[static_cast<std::size_t>(i)] = 1;
    BigInt den = 1;
    for (long k = 1; k <= max_steps; ++k) {
        std::vector<BigInt> nv(static_cast<std::size_t>(n) + 1, BigInt(0));
        for (int q = 2; q <= n; ++q) {
            const BigInt& mass = v[static_cast<std::size_t>(q)];
            if (mass == 0) continue;
            const auto& row = w[static_cast<std::size_t>(q)];
            for (int p = 1; p <= q; ++p)
                if (row[static_cast<std::size_t>(p)] != 0) nv[static_cast<std::size_t>(p)] += mass * row[static_cast<std::size_t>(p)];
        }
        den *= nn;
        law.pmf.push_back(make_rat(nv[1], den));
        nv[1] = 0;
        v.swap(nv);
        BigInt remaining = 0;
        for (int q = 2; q <= n; ++q) remaining += v[static_cast<std::size_t>(q)];
        Rat surv = make_rat(remaining, den);  // P(S > k) = P(S >= k+1)
        law.survival.push_back(surv);
        if (surv < eps) {
            law.tail = surv;
            return law;
        }
    }
    law.tail = law.survival.back();
    return law;
}

AbsorptionLawD absorption_law(const BlockMatrixD& m, int i, double eps, long max_steps) {
    check_state(m.n, i, "absorption_law");
    if (eps < 0) throw std::invalid_argument("absorption_law: eps < 0");
    const int n = m.n;
    AbsorptionLawD law;
    law.n = n;
    law.i = i;
    law.survival.push_back(1.0);
    if (i == 1) {
        law.pmf.push_back(1.0);
        law.tail = 0;
        law.survival.push_back(0.0);
        return law;
    }
    law.pmf.push_back(0.0);
    law.survival.push_back(1.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    for (long k = 1; k <= max_steps; ++k) {
        std::vector<double> nv(static_cast<std::size_t>(n) + 1, 0.0);
        for (int q = 2; q <= n; ++q) {
            const double mass = v[static_cast<std::size_t>(q)];
            if (mass == 0) continue;
            const auto& row = m.rows[static_cast<std::size_t>(q - 1)];
            for (int p = 1; p <= q; ++p) nv[static_cast<std::size_t>(p)] += mass * row[static_cast<std::size_t>(p - 1)];
        }
        law.pmf.push_back(nv[1]);
        nv[1] = 0;
        v.swap(nv);
        double remaining = 0;
        for (int q = 2; q <= n; ++q) remaining += v[static_cast<std::size_t>(q)];
        law.survival.push_back(remaining);
        if (remaining < eps) {
            law.tail = remaining;
            return law;
        }
    }
    law.tail = law.survival.back();
    return law;
}

AbsorptionLaw absorption_distribution(int n, int i, double eps) {
    if (eps <= 0) throw std::invalid_argument("absorption_distribution: eps <= 0");
    return absorption_law(block_transition_matrix(n), i, Rat(eps));
}

AbsorptionLawD absorption_distribution_double(int n, int i, double eps) {
    if (eps <= 0) throw std::invalid_argument("absorption_distribution_double: eps <= 0");
    return absorption_law(block_transition_matrix_double(n), i, eps);
}

void stream_survival(const BlockMatrix& m, int i,
                     const std::function<bool(long k, const BigInt& num, const BigInt& den)>& visit,
                     long max_steps) {
    check_state(m.n, i, "stream_survival");
    const int n = m.n;
    const BigInt one = 1;
    if (!visit(0, one, one)) return;
    if (i == 1) return;  // absorbed immediately; P(S >= k) = 0 afterwards
    BigInt nn = big_pow(n, static_cast<unsigned long>(n));
    std::vector<std::vector<BigInt>> w(static_cast<std::size_t>(n) + 1);
    for (int q = 2; q <= n; ++q) {
        auto& row = w[static_cast<std::size_t>(q)];
        row.assign(static_cast<std::size_t>(q) + 1, BigInt(0));
        for (int p = 2; p <= q; ++p) {
            const Rat& e = m.entry(q, p);
            row[static_cast<std::size_t>(p)] = e.get_num() * (nn / e.get_den());
        }
    }
    std::vector<BigInt> v(static_cast<std::size_t>(n) + 1, BigInt(0));
    v[static_cast<std::size_t>(i)] = 1;
    BigInt den = 1;
    if (!visit(1, one, one)) return;  // P(S >= 1) = 1 for i >= 2
    for (long k = 2; k <= max_steps; ++k) {
        std::vector<BigInt> nv(static_cast<std::size_t>(n) + 1, BigInt(0));
        for (int q = 2; q <= n; ++q) {
            const BigInt& mass = v[static_cast<std::size_t>(q)];
            if (mass == 0) continue;
            const auto& row = w[static_cast<std::size_t>(q)];
            for (int p = 2; p <= q; ++p)
                if (row[static_cast<std::size_t>(p)] != 0) nv[static_cast<std::size_t>(p)] += mass * row[static_cast<std::size_t>(p)];
        }
        den *= nn;
        v.swap(nv);
        BigInt remaining = 0;
        for (int q = 2; q <= n; ++q) remaining += v[static_cast<std::size_t>(q)];
        if (!visit(k, remaining, den)) return;
        if (remaining == 0) return;
    }
}

Rat mean_absorption_time(int n, int i) {
    check_state(n, i, "mean_absorption_time");
    if (i == 1) return Rat(0);
    auto s = stirling_table(n);
    std::vector<BigInt> ff(static_cast<std::size_t>(n) + 1);
    ff[0] = 1;
    for (int p = 1; p <= n; ++p) ff[static_cast<std::size_t>(p)] = ff[static_cast<std::size_t>(p - 1)] * (n - p + 1);
    // x_q = E[steps to 1 | start q]; triangular back-substitution
    std::vector<Rat> x(static_cast<std::size_t>(i) + 1, Rat(0));
    BigInt npow = n;  // N^q, starting at q = 1
    for (int q = 2; q <= i; ++q) {
        npow *= n;
        Rat acc = 1;
        for (int p = 2; p < q; ++p) {
            if (x[static_cast<std::size_t>(p)] == 0) continue;
            acc += make_rat(s[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] * ff[static_cast<std::size_t>(p)], npow) * x[static_cast<std::size_t>(p)];
        }
        Rat stay = make_rat(ff[static_cast<std::size_t>(q)], npow);
        x[static_cast<std::size_t>(q)] = acc / (Rat(1) - stay);
    }
    return x[static_cast<std::size_t>(i)];
}

Rat expected_decrease(int n, int q) {
    if (q < 1 || q > n) throw std::invalid_argument("expected_decrease: need 1 <= q <= n");
    // q - N + (N-1)^q / N^(q-1)
    BigInt num = big_pow(n - 1, static_cast<unsigned long>(q));
    BigInt den = big_pow(n, static_cast<unsigned long>(q - 1));
    return Rat(q - n) + make_rat(num, den);
}

double g_drift(int n, double s) {
    if (n < 2) throw std::invalid_argument("g_drift: n < 2");
    if (s < 1) throw std::invalid_argument("g_drift: s < 1");
    const double dn = static_cast<double>(n);
    return s - dn + dn * std::exp(s * std::log1p(-1.0 / dn));
}

Rat jump_two_probability(int n, int q) {
    if (q < 2 || q > n) throw std::invalid_argument("jump_two_probability: need 2 <= q <= n");
    BigInt npow = big_pow(n, static_cast<unsigned long>(q));
    Rat stay = make_rat(falling_factorial(n, q), npow);
    Rat one_down = make_rat(stirling2(q, q - 1) * falling_factorial(n, q - 1), npow);
    return Rat(1) - stay - one_down;
}

HittingTime expected_hitting_time(int n, int j) {
    if (j < 2 || j > n) throw std::invalid_argument("expected_hitting_time: need 2 <= j <= n");
    auto m = block_transition_matrix(n);
    // x_q = E[steps until state < j | start q], for q >= j
    std::vector<Rat> x(static_cast<std::size_t>(n) + 1, Rat(0));
    for (int q = j; q <= n; ++q) {
        Rat acc = 1;
        for (int p = j; p < q; ++p)
            if (x[static_cast<std::size_t>(p)] != 0) acc += m.entry(q, p) * x[static_cast<std::size_t>(p)];
        x[static_cast<std::size_t>(q)] = acc / (Rat(1) - m.entry(q, q));
    }
    HittingTime out;
    out.expected = x[static_cast<std::size_t>(n)];
    out.ratio = to_double(out.expected) * static_cast<double>(j) / static_cast<double>(n);
    return out;
}

Rat overshoot_probability(int n, int j) {
    if (j < 2 || j > n) throw std::invalid_argument("overshoot_probability: need 2 <= j <= n");
    auto m = block_transition_matrix(n);
    const int half = j / 2;  // floor(j/2); overshoot means landing at or below it
    std::vector<Rat> h(static_cast<std::size_t>(n) + 1, Rat(0));
    for (int q = 1; q < j; ++q) h[static_cast<std::size_t>(q)] = q <= half ? Rat(1) : Rat(0);
    for (int q = j; q <= n; ++q) {
        Rat acc = 0;
        for (int p = 1; p < q; ++p)
            if (h[static_cast<std::size_t>(p)] != 0) acc += m.entry(q, p) * h[static_cast<std::size_t>(p)];
        h[static_cast<std::size_t>(q)] = acc / (Rat(1) - m.entry(q, q));
    }
    return h[static_cast<std::size_t>(n)];
}

double theo1_constant() {
    // e * prod_{l>=1} (1 - 2/((l+1)(l+2)))^-1; the product telescopes to 3
    return 3.0 * std::exp(1.0);
}

double tail_bound(int n, long k) {
    if (n < 1 || k < 0) throw std::invalid_argument("tail_bound: bad arguments");
    const double r = static_cast<double>(k) / static_cast<double>(n);
    return theo1_constant() * std::max(r, 1.0) * std::exp(-std::max(r - 1.0, 0.0));
}

double kprime_default() {
    const double e = std::exp(1.0);
    return e * e * (1.0 + 3.0 * e);
}

double single_jump_laplace_closed_form(int n, int i, double alpha) {
    check_state(n, i, "single_jump_laplace_closed_form");
    if (alpha < 0 || alpha >= 1) throw std::invalid_argument("single_jump_laplace_closed_form: need 0 <= alpha < 1");
    const double dn = static_cast<double>(n);
    double out = std::exp(alpha * static_cast<double>(i - 1) / dn);
    // p_{N,j} = (N)_{j+1}/N^{j+1} = prod_{k=1..j} (N-k)/N
    double p = 1.0;
    const double ea = std::exp(alpha / dn);
    for (int j = 1; j <= i - 1; ++j) {
        p *= (dn - static_cast<double>(j)) / dn;
        const double denom = 1.0 - ea * p;
        if (denom <= 0) throw std::domain_error("single_jump_laplace_closed_form: transform diverges");
        out *= (1.0 - p) / denom;
    }
    return out;
}

LaplaceBracket laplace_exact(int n, int i, double alpha) {
    check_state(n, i, "laplace_exact");
    if (alpha < 0 || alpha >= 1) throw std::invalid_argument("laplace_exact: need 0 <= alpha < 1");
    LaplaceBracket out;
    if (i == 1) {
        out.lower = out.upper = 1.0;
        return out;
    }
    auto m = block_transition_matrix_double(n);
    const double dn = static_cast<double>(n);
    // per-state single-jump Laplace values used to dominate the remainder
    std::vector<double> lt(static_cast<std::size_t>(n) + 1, 1.0);
    for (int q = 2; q <= n; ++q) lt[static_cast<std::size_t>(q)] = single_jump_laplace_closed_form(n, q, alpha);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    double partial = 0.0, remainder = 0.0;
    const long cap = 5'000'000;
    for (long k = 1; k <= cap; ++k) {
        std::vector<double> nv(static_cast<std::size_t>(n) + 1, 0.0);
        for (int q = 2; q <= n; ++q) {
            const double mass = v[static_cast<std::size_t>(q)];
            if (mass == 0) continue;
            const auto& row = m.rows[static_cast<std::size_t>(q - 1)];
            for (int p = 1; p <= q; ++p) nv[static_cast<std::size_t>(p)] += mass * row[static_cast<std::size_t>(p - 1)];
        }
        partial += nv[1] * std::exp(alpha * static_cast<double>(k) / dn);
        nv[1] = 0;
        v.swap(nv);
        remainder = 0;
        for (int q = 2; q <= n; ++q)
            remainder += v[static_cast<std::size_t>(q)] * lt[static_cast<std::size_t>(q)];
        remainder *= std::exp(alpha * static_cast<double>(k) / dn);
        if (remainder < 1e-14 * (partial + 1.0)) break;
    }
    out.lower = partial;
    out.upper = partial + remainder;
    return out;
}

double limit_law_laplace(double alpha, double tol) {
    if (alpha < 0 || alpha >= 1) throw std::invalid_argument("limit_law_laplace: need 0 <= alpha < 1");
    if (tol <= 0) throw std::invalid_argument("limit_law_laplace: tol <= 0");
    if (alpha == 0) return 1.0;
    double log_prod = 0.0;
    for (long l = 0;; ++l) {
        const double d = static_cast<double>(l + 1) * static_cast<double>(l + 2);
        const double x = 2.0 * alpha / d;
        log_prod -= std::log1p(-x);
        // remaining log mass <= sum_{m>l} (2a/((m+1)(m+2))) / (1-x) = (2a/(l+2)) / (1-x)
        const double rem = (2.0 * alpha / static_cast<double>(l + 2)) / (1.0 - x);
        if (rem < tol) break;
        if (l > 100'000'000) throw std::runtime_error("limit_law_laplace: truncation did not converge");
    }
    return std::exp(log_prod);
}

double sample_limit_law(Rng& rng, int trunc) {
    if (trunc < 1) throw std::invalid_argument("sample_limit_law: trunc < 1");
    double out = 0.0;
    for (int l = 0; l < trunc; ++l)
        out += 2.0 / (static_cast<double>(l + 1) * static_cast<double>(l + 2)) * rng.exponential();
    // omitted tail replaced by its mean; the induced bias is documented
    out += 2.0 / static_cast<double>(trunc + 1);
    return out;
}

BlockChainSampler::BlockChainSampler(const BlockMatrixD& m) : n_(m.n) {
    cumulative_.resize(static_cast<std::size_t>(n_));
    for (int q = 1; q <= n_; ++q) {
        auto& cum = cumulative_[static_cast<std::size_t>(q - 1)];
        cum.resize(static_cast<std::size_t>(q));
        double acc = 0;
        for (int p = 1; p <= q; ++p) {
            acc += m.entry(q, p);
            cum[static_cast<std::size_t>(p - 1)] = acc;
        }
    }
}

long BlockChainSampler::sample_absorption_time(int i, Rng& rng) const {
    check_state(n_, i, "sample_absorption_time");
    int state = i;
    long steps = 0;
    while (state != 1) {
        state = static_cast<int>(rng.from_cumulative(cumulative_[static_cast<std::size_t>(state - 1)])) + 1;
        ++steps;
    }
    return steps;
}

CorollaryCheck corollary_bound(int n, long k, double lambda, double kprime) {
    if (lambda <= 0) throw std::invalid_argument("corollary_bound: lambda <= 0");
    const double dn = static_cast<double>(n);
    if (static_cast<double>(k) < dn + 1.0 / lambda)
        throw std::invalid_argument("corollary_bound: need k >= n + 1/lambda");
    auto law = absorption_law(block_transition_matrix_double(n), n, 0.0, k);
    CorollaryCheck out;
    for (long s = 0; s < static_cast<long>(law.pmf.size()) && s <= k; ++s)
        out.exact += law.pmf[static_cast<std::size_t>(s)] *
                     std::exp(-lambda * static_cast<double>(k - s));
    const double ratio = static_cast<double>(k) / dn;
    out.bound = kprime * ratio * std::exp(-ratio / (1.0 + 1.0 / (lambda * dn)));
    return out;
}

std::vector<Rat> single_jump_pmf_geometric(int n, int i, int horizon) {
    check_state(n, i, "single_jump_pmf_geometric");
    if (horizon < 0) throw std::invalid_argument("single_jump_pmf_geometric: horizon < 0");
    std::vector<Rat> pmf(static_cast<std::size_t>(horizon) + 1, Rat(0));
    if (i == 1) {
        pmf[0] = 1;
        return pmf;
    }
    const int shift = i - 1;
    if (horizon < shift) return pmf;  // Stilde >= i-1 always
    // convolution of the i-1 geometric summands, truncated at the horizon
    std::vector<Rat> conv{Rat(1)};
    for (int j = 1; j <= i - 1; ++j) {
        BigInt denom = big_pow(n, static_cast<unsigned long>(j + 1));
        Rat p = make_rat(falling_factorial(n, j + 1), denom);
        const int room = horizon - shift;
        std::vector<Rat> geo;
        Rat mass = Rat(1) - p;
        for (int t = 0; t <= room; ++t) {
            geo.push_back(mass);
            mass *= p;
        }
        std::vector<Rat> next(static_cast<std::size_t>(room) + 1, Rat(0));
        for (std::size_t a = 0; a < conv.size(); ++a) {
            if (conv[a] == 0) continue;
            for (std::size_t b = 0; a + b <= static_cast<std::size_t>(room); ++b)
                next[a + b] += conv[a] * geo[b];
        }
        conv.swap(next);
    }
    for (std::size_t t = 0; t < conv.size() && shift + static_cast<int>(t) <= horizon; ++t)
        pmf[static_cast<std::size_t>(shift) + t] = conv[t];
    return pmf;
}

FixedIReport fixed_i_limit_check(int i, const std::vector<int>& n_list) {
    if (i < 2) throw std::invalid_argument("fixed_i_limit_check: i < 2");
    FixedIReport report;
    for (int n : n_list) {
        if (i > n) throw std::invalid_argument("fixed_i_limit_check: i > n");
        auto law = absorption_law(single_jump_matrix(n), i, make_rat(1, big_pow(10, 16)));
        const int horizon = static_cast<int>(law.pmf.size()) - 1;
        auto conv = single_jump_pmf_geometric(n, i, horizon);
        for (int k = 0; k <= horizon; ++k)
            if (law.pmf[static_cast<std::size_t>(k)] != conv[static_cast<std::size_t>(k)])
                report.pmf_match = false;
        // Laplace of (Stilde - i + 1)/N against the closed-form product. The
        // alpha grid stays at or below 1/2 so the mass beyond the computed
        // horizon (survival < 1e-16, decay rate at worst e^{-k/N}) cannot
        // contribute more than ~1e-8 to the truncated transform.
        for (double alpha : {0.1, 0.25, 0.5}) {
            const double dn = static_cast<double>(n);
            double lhs = 0;
            for (int k = 0; k <= horizon; ++k)
                lhs += to_double(law.pmf[static_cast<std::size_t>(k)]) *
                       std::exp(alpha * static_cast<double>(k - i + 1) / dn);
            double rhs = single_jump_laplace_closed_form(n, i, alpha) *
                         std::exp(-alpha * static_cast<double>(i - 1) / dn);
            report.laplace_max_err = std::max(report.laplace_max_err, std::fabs(lhs - rhs));
        }
    }
    return report;
}

}  // namespace wfcoal
