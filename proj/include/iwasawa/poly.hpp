#pragma once

#include "iwasawa/bigint.hpp"
#include "iwasawa/context.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iwasawa {

/// Polynomial over Z with ascending coefficients; index i holds the T^i
/// coefficient. Stands in for an element of Z_p[[T]] known to polynomial
/// accuracy. Kept normalized: no trailing zero coefficients.
struct IntPoly {
    std::vector<Int> c;

    IntPoly() = default;
    explicit IntPoly(std::vector<Int> coeffs) : c(std::move(coeffs)) { normalize(); }

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    bool is_zero() const { return c.empty(); }
    long degree() const { return static_cast<long>(c.size()) - 1; }  // -1 for zero

    const Int& coeff(size_t i) const {
        static const Int zero = 0;
        return i < c.size() ? c[i] : zero;
    }

    bool operator==(const IntPoly&) const = default;

    static IntPoly constant(Int v) { return IntPoly{{std::move(v)}}; }
    static IntPoly monomial(size_t d, Int lead = 1) {
        std::vector<Int> v(d + 1);
        v[d] = std::move(lead);
        return IntPoly{std::move(v)};
    }
};

inline IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> v(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
    return IntPoly{std::move(v)};
}

inline IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> v(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) - b.coeff(i);
    return IntPoly{std::move(v)};
}

inline IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Int> v(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) v[i + j] += a.c[i] * b.c[j];
    }
    return IntPoly{std::move(v)};
}

inline IntPoly operator*(const Int& s, const IntPoly& a) {
    std::vector<Int> v(a.c.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = s * a.c[i];
    return IntPoly{std::move(v)};
}

inline Int evaluate(const IntPoly& f, const Int& x) {
    Int r = 0;
    for (size_t i = f.c.size(); i-- > 0;) r = r * x + f.c[i];
    return r;
}

/// Coefficients reduced into [0, m). Canonical representative mod m.
inline IntPoly reduce_mod(const IntPoly& f, const Int& m) {
    std::vector<Int> v(f.c.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = mod_floor(f.c[i], m);
    return IntPoly{std::move(v)};
}

inline bool congruent_mod(const IntPoly& a, const IntPoly& b, const Int& m) {
    for (size_t i = 0; i < std::max(a.c.size(), b.c.size()); ++i)
        if (mod_floor(a.coeff(i) - b.coeff(i), m) != 0) return false;
    return true;
}

/// Division with remainder by a monic divisor: a = q*b + r, deg r < deg b.
/// Exact over the integers because b is monic.
inline std::pair<IntPoly, IntPoly> divmod_monic(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero() || b.c.back() != 1)
        throw validation_error("divmod_monic: divisor must be monic");
    const long db = b.degree();
    IntPoly r = a;
    if (r.degree() < db) return {IntPoly{}, std::move(r)};
    std::vector<Int> q(r.degree() - db + 1);
    for (long i = r.degree(); i >= db; --i) {
        Int f = r.coeff(static_cast<size_t>(i));
        if (f != 0) {
            q[static_cast<size_t>(i - db)] = f;
            for (long j = 0; j <= db; ++j)
                r.c[static_cast<size_t>(i - db + j)] -= f * b.c[static_cast<size_t>(j)];
        }
    }
    r.normalize();
    return {IntPoly{std::move(q)}, std::move(r)};
}

/// Exact quotient a/b over Z for monic b, or nullopt when b does not divide a.
inline std::optional<IntPoly> divide_exact(const IntPoly& a, const IntPoly& b) {
    auto [q, r] = divmod_monic(a, b);
    if (!r.is_zero()) return std::nullopt;
    return q;
}

/// a*b reduced mod the monic polynomial m, exact integer coefficients.
inline IntPoly mulmod_monic(const IntPoly& a, const IntPoly& b, const IntPoly& m) {
    return divmod_monic(a * b, m).second;
}

/// base^exp mod monic m. Exact integers throughout; coefficient growth is
/// bounded by the repeated reduction.
inline IntPoly powmod_monic(const IntPoly& base, const Int& exp, const IntPoly& m) {
    if (exp < 0) throw validation_error("powmod_monic: negative exponent");
    IntPoly acc = divmod_monic(IntPoly::constant(1), m).second;
    IntPoly sq = divmod_monic(base, m).second;
    Int e = exp;
    while (e > 0) {
        if ((e & 1) != 0) acc = mulmod_monic(acc, sq, m);
        e >>= 1;
        if (e > 0) sq = mulmod_monic(sq, sq, m);
    }
    return acc;
}

inline bool is_monic(const IntPoly& f) { return !f.is_zero() && f.c.back() == 1; }

/// Monic with every non-leading coefficient divisible by p.
inline bool is_distinguished(const IntPoly& f, const PrecisionContext& ctx) {
    if (!is_monic(f)) return false;
    const Int p = ctx.prime();
    for (size_t i = 0; i + 1 < f.c.size(); ++i)
        if (f.c[i] % p != 0) return false;
    return true;
}

/// A distinguished polynomial with its degree split out. Degree 0 is the
/// constant 1, used as an empty factor.
struct DistinguishedPoly {
    IntPoly poly;
    long degree = 0;

    bool operator==(const DistinguishedPoly&) const = default;
};

inline DistinguishedPoly make_distinguished(IntPoly f, const PrecisionContext& ctx) {
    if (!is_distinguished(f, ctx))
        throw validation_error("make_distinguished: polynomial is not distinguished");
    long d = f.degree();
    return DistinguishedPoly{std::move(f), d};
}

inline DistinguishedPoly distinguished_one() { return DistinguishedPoly{IntPoly::constant(1), 0}; }

namespace detail {

// (1+T)^{p^n} - 1 with no level bound; exact integers.
inline IntPoly omega_unchecked(const Int& p, int n) {
    IntPoly u{{1, 1}};  // 1 + T
    IntPoly acc = u;
    for (int i = 0; i < n; ++i) {
        // acc <- acc^p by square-and-multiply on the exponent
        IntPoly base = acc;
        IntPoly r = IntPoly::constant(1);
        Int e = p;
        while (e > 0) {
            if ((e & 1) != 0) r = r * base;
            e >>= 1;
            if (e > 0) base = base * base;
        }
        acc = std::move(r);
    }
    return acc - IntPoly::constant(1);
}

// nu_0 = T, nu_k = omega_k / omega_{k-1}; no level bound.
inline IntPoly cyclotomic_unchecked(const Int& p, int k) {
    if (k == 0) return IntPoly{{0, 1}};
    auto q = divide_exact(omega_unchecked(p, k), omega_unchecked(p, k - 1));
    if (!q) throw consistency_error("cyclotomic_unchecked: omega division failed");
    return *q;
}

}  // namespace detail

inline IntPoly omega(int n, const PrecisionContext& ctx) {
    ctx.require_level(n);
    return detail::omega_unchecked(ctx.prime(), n);
}

inline DistinguishedPoly nu(int k, const PrecisionContext& ctx) {
    ctx.require_level(k);
    return make_distinguished(detail::cyclotomic_unchecked(ctx.prime(), k), ctx);
}

/// True iff no cyclotomic factor nu_k divides g. Only finitely many candidates
/// matter: deg nu_k is strictly increasing, so k with deg nu_k > deg g cannot
/// divide. Independent of n_cap by design.
inline bool is_coprime_to_all_omega(const DistinguishedPoly& g, const PrecisionContext& ctx) {
    if (g.degree < 1) throw validation_error("is_coprime_to_all_omega: degree must be >= 1");
    const Int p = ctx.prime();
    for (int k = 0;; ++k) {
        IntPoly nk = detail::cyclotomic_unchecked(p, k);
        if (nk.degree() > g.degree) return true;
        if (divide_exact(g.poly, nk)) return false;
    }
}

/// f == p^mu_exp * unit * dist modulo p^prec, as a polynomial identity. The
/// unit and dist parts are determined (and stored reduced) mod p^(prec-mu_exp).
struct PreparedForm {
    int mu_exp = 0;
    IntPoly unit;
    DistinguishedPoly dist;
};

namespace detail {

// Inverse of a power series with unit constant term, mod (p^N as integers,
// T^bound). Coefficients reduced into [0, modulus).
inline IntPoly series_inverse(const IntPoly& b, const Int& modulus, size_t bound) {
    if (b.is_zero()) throw validation_error("series_inverse: zero input");
    Int c0 = mod_inverse(b.coeff(0), modulus);
    std::vector<Int> inv(bound);
    inv[0] = c0;
    for (size_t k = 1; k < bound; ++k) {
        Int s = 0;
        for (size_t j = 1; j <= k; ++j) s += b.coeff(j) * inv[k - j];
        inv[k] = mod_floor(-c0 * s, modulus);
    }
    return IntPoly{std::move(inv)};
}

}  // namespace detail

/// Weierstrass preparation at finite precision. Splits off the content p^mu,
/// then separates the distinguished part of degree d (d = first coefficient of
/// p-adic valuation zero) from a polynomial unit via Weierstrass division.
inline PreparedForm weierstrass_prepare(const IntPoly& f, const PrecisionContext& ctx) {
    const Int p = ctx.prime();
    const Int pmod = ctx.coeff_modulus();
    IntPoly red = reduce_mod(f, pmod);
    if (red.is_zero())
        throw validation_error("weierstrass_prepare: input is 0 mod p^prec, precision exhausted");

    int mu = ctx.prec;
    for (const Int& x : red.c)
        if (x != 0) mu = std::min(mu, static_cast<int>(*p_valuation(x, p)));
    const int n_rem = ctx.prec - mu;  // remaining precision, >= 1
    const Int pn = int_pow(p, static_cast<unsigned long>(n_rem));
    std::vector<Int> f1c(red.c.size());
    for (size_t i = 0; i < red.c.size(); ++i) f1c[i] = mod_floor(red.c[i] / int_pow(p, static_cast<unsigned long>(mu)), pn);
    IntPoly f1{std::move(f1c)};

    long d = -1;
    for (size_t i = 0; i < f1.c.size(); ++i)
        if (f1.c[i] % p != 0) {
            d = static_cast<long>(i);
            break;
        }
    if (d < 0) throw consistency_error("weierstrass_prepare: no unit coefficient after content split");

    if (d == 0) {
        // pure unit, empty distinguished part
        return PreparedForm{mu, f1, distinguished_one()};
    }

    // Hensel-lift the mod-p factorization f1 = T^d * w (w = tail of f1 from
    // index d, unit constant term; the two factors are coprime mod p). Each
    // lift step solves delta*w + eps*T^d = c mod p via the Bezout inverse of w
    // mod (p, T^d). All degrees stay bounded by deg f1, no series truncation.
    std::vector<Int> tailc(f1.c.begin() + d, f1.c.end());
    IntPoly tail{std::move(tailc)};
    IntPoly w_bar = reduce_mod(tail, p);
    IntPoly tau = detail::series_inverse(w_bar, p, static_cast<size_t>(d));

    IntPoly D = IntPoly::monomial(static_cast<size_t>(d));
    IntPoly U = tail;  // f1 - D*U is the low part of f1, divisible by p
    for (int k = 1; k < n_rem; ++k) {
        const Int pk = int_pow(p, static_cast<unsigned long>(k));
        IntPoly e = f1 - D * U;
        std::vector<Int> cc(e.c.size());
        for (size_t i = 0; i < e.c.size(); ++i) {
            if (e.c[i] % pk != 0)
                throw consistency_error("weierstrass_prepare: lift error not divisible by p^k");
            cc[i] = mod_floor(e.c[i] / pk, p);
        }
        IntPoly c{std::move(cc)};
        IntPoly delta = reduce_mod(c * tau, p);
        if (delta.c.size() > static_cast<size_t>(d)) {
            delta.c.resize(static_cast<size_t>(d));
            delta.normalize();
        }
        IntPoly rest = reduce_mod(c - delta * w_bar, p);
        std::vector<Int> epsc;
        for (size_t i = 0; i < rest.c.size(); ++i) {
            if (i < static_cast<size_t>(d)) {
                if (rest.c[i] != 0)
                    throw consistency_error("weierstrass_prepare: Bezout step failed");
            } else {
                epsc.push_back(rest.c[i]);
            }
        }
        D = reduce_mod(D + pk * delta, pn);
        U = reduce_mod(U + pk * IntPoly{std::move(epsc)}, pn);
    }
    if (!congruent_mod(f1, D * U, pn))
        throw consistency_error("weierstrass_prepare: lifted factors do not multiply back");
    if (!is_distinguished(D, ctx))
        throw consistency_error("weierstrass_prepare: non-distinguished factor");
    if (U.coeff(0) % p == 0)
        throw consistency_error("weierstrass_prepare: unit constant term not a p-unit");
    return PreparedForm{mu, std::move(U), DistinguishedPoly{std::move(D), d}};
}

/// Image of a distinguished polynomial under T -> 1/(1+T) - 1, renormalized to
/// a distinguished representative mod p^prec. For g of degree d this is
/// (1+T)^d * g(1/(1+T) - 1) = sum_i c_i (-T)^i (1+T)^{d-i}, an exact integer
/// polynomial, divided by its leading coefficient g(-1) (a p-unit).
inline DistinguishedPoly iota_twist_poly(const DistinguishedPoly& g, const PrecisionContext& ctx) {
    const Int pmod = ctx.coeff_modulus();
    const long d = g.degree;
    if (d == 0) return distinguished_one();
    IntPoly h;
    for (long i = 0; i <= d; ++i) {
        const Int& ci = g.poly.coeff(static_cast<size_t>(i));
        if (ci == 0) continue;
        // (-T)^i (1+T)^{d-i}
        IntPoly term = IntPoly::constant(ci);
        IntPoly one_plus_t{{1, 1}};
        for (long j = 0; j < d - i; ++j) term = term * one_plus_t;
        IntPoly mono = IntPoly::monomial(static_cast<size_t>(i), (i % 2 == 0) ? 1 : -1);
        h = h + term * mono;
    }
    Int lead = h.coeff(static_cast<size_t>(d));  // equals g(-1)
    if (lead % ctx.prime() == 0)
        throw consistency_error("iota_twist_poly: leading coefficient not a p-unit");
    Int linv = mod_inverse(lead, pmod);
    IntPoly out = reduce_mod(linv * h, pmod);
    out.c.resize(static_cast<size_t>(d) + 1);
    out.c[static_cast<size_t>(d)] = 1;
    if (!is_distinguished(out, ctx))
        throw consistency_error("iota_twist_poly: twisted polynomial not distinguished");
    return DistinguishedPoly{std::move(out), d};
}

/// Human-readable rendering, highest degree first: "T^2 + 3T + 3".
inline std::string to_string(const IntPoly& f) {
    if (f.is_zero()) return "0";
    std::string s;
    for (long i = f.degree(); i >= 0; --i) {
        const Int& ci = f.coeff(static_cast<size_t>(i));
        if (ci == 0) continue;
        Int mag = abs(ci);
        if (s.empty()) {
            if (ci < 0) s += "-";
        } else {
            s += (ci < 0) ? " - " : " + ";
        }
        if (mag != 1 || i == 0) s += mag.str();
        if (i >= 1) s += "T";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
}

}  // namespace iwasawa
