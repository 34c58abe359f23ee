#pragma once

#include "iwasawa/bigint.hpp"

namespace iwasawa {

/// Ambient parameters for all Lambda = Z_p[[T]] computations: the odd prime p,
/// the tower depth bound n_cap (levels 0..n_cap are materializable), and the
/// coefficient precision exponent prec (coefficients are compared mod p^prec).
struct PrecisionContext {
    long p = 3;
    int n_cap = 4;
    int prec = 8;

    bool operator==(const PrecisionContext&) const = default;

    Int prime() const { return Int(p); }

    /// p^prec, the working coefficient modulus.
    Int coeff_modulus() const { return int_pow(Int(p), static_cast<unsigned long>(prec)); }

    /// p^n for a tower level n <= n_cap.
    long level_size(int n) const {
        require_level(n);
        long r = 1;
        for (int i = 0; i < n; ++i) r *= p;
        return r;
    }

    void require_level(int n) const {
        if (n < 0 || n > n_cap)
            throw validation_error("level " + std::to_string(n) + " exceeds tower depth bound " +
                                   std::to_string(n_cap));
    }
};

/// Default desk-scale depth bound: deep enough for growth-law fits, shallow
/// enough that omega_n action matrices stay exactly computable.
inline int default_n_cap(long p) {
    if (p == 3) return 4;
    if (p == 5) return 3;
    return 2;
}

inline PrecisionContext make_context(long p, int prec, int n_cap = -1) {
    if (!is_odd_prime(Int(p))) throw validation_error("context: p must be an odd prime >= 3");
    if (prec < 2) throw validation_error("context: prec must be >= 2");
    if (n_cap < 0) n_cap = default_n_cap(p);
    if (n_cap < 1) throw validation_error("context: n_cap must be >= 1");
    return PrecisionContext{p, n_cap, prec};
}

}  // namespace iwasawa
