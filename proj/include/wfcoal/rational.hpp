#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wfcoal {

// Exact arithmetic used throughout the exact solvers. BigInt/Rat are GMP
// values; both are value types, safe to copy and share across threads once
// constructed.
using BigInt = mpz_class;
using Rat = mpq_class;

inline BigInt big_pow(const BigInt& base, unsigned long exp) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

inline BigInt big_pow(long base, unsigned long exp) { return big_pow(BigInt(base), exp); }

// (n)_p = n (n-1) ... (n-p+1), the falling factorial.
inline BigInt falling_factorial(long n, long p) {
    if (p < 0) throw std::invalid_argument("falling_factorial: p < 0");
    BigInt out = 1;
    for (long k = 0; k < p; ++k) out *= (n - k);
    return out;
}

inline BigInt factorial(long n) {
    BigInt out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

inline BigInt binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

inline Rat make_rat(const BigInt& num, const BigInt& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

// Serialized form used in CSV output: "num/den" (den printed even when 1).
inline std::string rat_to_string(const Rat& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Accepts "a/b", integers, and plain decimals ("0.25" -> 1/4). Scientific
// notation is not accepted; kernel files should stay human-readable.
inline Rat parse_rat(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rat r(text);
        r.canonicalize();
        if (r.get_den() == 0) throw std::invalid_argument("parse_rat: zero denominator");
        return r;
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        return Rat(BigInt(text), 1);
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    bool neg = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
        neg = digits[0] == '-';
        digits = digits.substr(1);
    }
    if (digits.empty()) throw std::invalid_argument("parse_rat: bad literal '" + text + "'");
    BigInt num(digits);
    if (neg) num = -num;
    BigInt den = big_pow(10, static_cast<unsigned long>(text.size() - dot - 1));
    return make_rat(num, den);
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

}  // namespace wfcoal
