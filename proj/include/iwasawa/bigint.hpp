#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace iwasawa {

/// Exact arbitrary-precision signed integer used throughout.
using Int = boost::multiprecision::cpp_int;

/// Thrown when an input violates a documented contract (bad prime, malformed
/// polynomial, mismatched contexts, ...). Maps to CLI exit code 1.
class validation_error : public std::invalid_argument {
  public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a computation contradicts an identity that must hold by
/// construction; signals an implementation bug. Maps to CLI exit code 3.
class consistency_error : public std::runtime_error {
  public:
    explicit consistency_error(const std::string& what) : std::runtime_error(what) {}
};

inline Int int_pow(const Int& base, unsigned long exp) {
    Int r = 1;
    Int b = base;
    while (exp != 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

/// Largest k with p^k | x; empty for x = 0 (v_p(0) = infinity).
inline std::optional<long> p_valuation(Int x, const Int& p) {
    if (p < 3 || p % 2 == 0) throw validation_error("p_valuation: p must be an odd prime");
    if (x == 0) return std::nullopt;
    long v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

/// Representative of a mod m in [0, m), m > 0.
inline Int mod_floor(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

/// Inverse of a mod m (m > 1, gcd(a, m) = 1), in [0, m).
inline Int mod_inverse(const Int& a, const Int& m) {
    Int r0 = m, r1 = mod_floor(a, m);
    Int t0 = 0, t1 = 1;
    while (r1 != 0) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        Int t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1) throw validation_error("mod_inverse: element not invertible");
    return mod_floor(t0, m);
}

inline bool is_odd_prime(const Int& p) {
    if (p < 3 || p % 2 == 0) return false;
    for (Int d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

}  // namespace iwasawa
