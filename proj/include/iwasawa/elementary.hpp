#pragma once

#include "iwasawa/bigint.hpp"
#include "iwasawa/context.hpp"
#include "iwasawa/poly.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace iwasawa {

/// A prime of Lambda occurring in an elementary module: p itself, a cyclotomic
/// factor nu_k (stored symbolically by level so divisibility facts are exact),
/// or a generic distinguished polynomial coprime to the whole omega tower.
enum class FactorKind { MuPrime = 0, Cyclotomic = 1, Generic = 2 };

struct PrimeFactor {
    FactorKind kind = FactorKind::MuPrime;
    int level = -1;                           // Cyclotomic only
    DistinguishedPoly g = distinguished_one();  // Generic only

    bool operator==(const PrimeFactor&) const = default;
};

inline PrimeFactor mu_prime_factor() { return PrimeFactor{FactorKind::MuPrime, -1, distinguished_one()}; }
inline PrimeFactor cyclotomic_factor(int level) {
    return PrimeFactor{FactorKind::Cyclotomic, level, distinguished_one()};
}
inline PrimeFactor generic_factor(DistinguishedPoly g) {
    return PrimeFactor{FactorKind::Generic, -1, std::move(g)};
}

struct FactorPower {
    PrimeFactor factor;
    int exp = 1;

    bool operator==(const FactorPower&) const = default;
};

/// Elementary module Lambda^rank + sum Lambda/factor^exp over a fixed context.
/// The factor list has multiset semantics: repeated entries mean repeated
/// summands, not a merged power.
struct ElementaryModule {
    PrecisionContext ctx;
    long rank = 0;
    std::vector<FactorPower> factors;

    bool operator==(const ElementaryModule&) const = default;
};

/// Degree of the residual polynomial of a factor: 0 for p, deg nu_k, or deg g.
inline long factor_degree(const PrimeFactor& f, const PrecisionContext& ctx) {
    switch (f.kind) {
        case FactorKind::MuPrime: return 0;
        case FactorKind::Cyclotomic: {
            if (f.level == 0) return 1;
            Int d = int_pow(ctx.prime(), static_cast<unsigned long>(f.level - 1)) * (ctx.prime() - 1);
            return static_cast<long>(d);
        }
        case FactorKind::Generic: return f.g.degree;
    }
    throw validation_error("factor_degree: bad kind");
}

/// Expanded polynomial of a non-MuPrime factor (exact for Cyclotomic).
inline IntPoly factor_poly(const PrimeFactor& f, const PrecisionContext& ctx) {
    switch (f.kind) {
        case FactorKind::Cyclotomic: return detail::cyclotomic_unchecked(ctx.prime(), f.level);
        case FactorKind::Generic: return f.g.poly;
        default: throw validation_error("factor_poly: MuPrime has no polynomial");
    }
}

inline void validate_factor(const FactorPower& fp, const PrecisionContext& ctx) {
    if (fp.exp < 1) throw validation_error("factor exponent must be >= 1");
    switch (fp.factor.kind) {
        case FactorKind::MuPrime: return;
        case FactorKind::Cyclotomic:
            ctx.require_level(fp.factor.level);
            return;
        case FactorKind::Generic:
            if (fp.factor.g.degree < 1)
                throw validation_error("generic factor must have degree >= 1");
            if (!is_distinguished(fp.factor.g.poly, ctx))
                throw validation_error("generic factor is not distinguished");
            if (!is_coprime_to_all_omega(fp.factor.g, ctx))
                throw validation_error(
                    "generic factor divides some omega_n; use a cyclotomic factor instead");
            return;
    }
    throw validation_error("validate_factor: bad kind");
}

inline ElementaryModule make_elementary(PrecisionContext ctx, long rank,
                                        std::vector<FactorPower> factors) {
    if (rank < 0) throw validation_error("rank must be >= 0");
    for (const auto& fp : factors) validate_factor(fp, ctx);
    return ElementaryModule{ctx, rank, std::move(factors)};
}

inline ElementaryModule zero_module(const PrecisionContext& ctx) { return {ctx, 0, {}}; }
inline ElementaryModule free_module(const PrecisionContext& ctx, long r) {
    return make_elementary(ctx, r, {});
}

/// Same factor list with the free part removed.
inline ElementaryModule torsion_part(const ElementaryModule& e) {
    return ElementaryModule{e.ctx, 0, e.factors};
}

inline long lambda_invariant(const ElementaryModule& e) {
    long s = 0;
    for (const auto& fp : e.factors)
        if (fp.factor.kind != FactorKind::MuPrime) s += fp.exp * factor_degree(fp.factor, e.ctx);
    return s;
}

inline long mu_invariant(const ElementaryModule& e) {
    long s = 0;
    for (const auto& fp : e.factors)
        if (fp.factor.kind == FactorKind::MuPrime) s += fp.exp;
    return s;
}

namespace detail {

inline std::tuple<int, int, long, const std::vector<Int>*, int> factor_sort_key(
    const FactorPower& fp) {
    static const std::vector<Int> empty;
    const bool generic = fp.factor.kind == FactorKind::Generic;
    return {static_cast<int>(fp.factor.kind), fp.factor.level,
            generic ? fp.factor.g.degree : 0, generic ? &fp.factor.g.poly.c : &empty, fp.exp};
}

inline bool factor_power_less(const FactorPower& a, const FactorPower& b) {
    auto [ka, la, da, ca, ea] = factor_sort_key(a);
    auto [kb, lb, db, cb, eb] = factor_sort_key(b);
    if (ka != kb) return ka < kb;
    if (la != lb) return la < lb;
    if (da != db) return da < db;
    if (*ca != *cb) return std::lexicographical_compare(ca->begin(), ca->end(), cb->begin(), cb->end());
    return ea < eb;
}

}  // namespace detail

/// Sorted representative with Generic coefficients reduced into [0, p^prec).
/// Reduction keeps distinguishedness: p divides p^prec.
inline ElementaryModule canonical_form(const ElementaryModule& e) {
    ElementaryModule out = e;
    const Int pm = e.ctx.coeff_modulus();
    for (auto& fp : out.factors) {
        if (fp.factor.kind != FactorKind::Generic) continue;
        IntPoly red = reduce_mod(fp.factor.g.poly, pm);
        red.c.resize(static_cast<size_t>(fp.factor.g.degree) + 1);
        red.c[static_cast<size_t>(fp.factor.g.degree)] = 1;
        fp.factor.g = DistinguishedPoly{std::move(red), fp.factor.g.degree};
    }
    std::sort(out.factors.begin(), out.factors.end(), detail::factor_power_less);
    return out;
}

inline bool equal_canonical(const ElementaryModule& a, const ElementaryModule& b) {
    return canonical_form(a) == canonical_form(b);
}

inline ElementaryModule direct_sum(const ElementaryModule& a, const ElementaryModule& b) {
    if (!(a.ctx == b.ctx)) throw validation_error("direct_sum: mismatched contexts");
    ElementaryModule out = a;
    out.rank += b.rank;
    out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
    return canonical_form(out);
}

/// Twist by the involution T -> 1/(1+T) - 1. Rank and MuPrime parts are fixed;
/// cyclotomic factors are stable up to unit; Generic polynomials are twisted.
inline ElementaryModule iota_twist_module(const ElementaryModule& e) {
    ElementaryModule out = e;
    for (auto& fp : out.factors)
        if (fp.factor.kind == FactorKind::Generic)
            fp.factor.g = iota_twist_poly(fp.factor.g, e.ctx);
    return canonical_form(out);
}

/// Generator p^mu_total * prod g^e of the characteristic ideal of a torsion
/// module, with exponents aggregated per distinct polynomial (mod p^prec) so
/// that equality of results means equality of ideals.
struct CharIdeal {
    long mu_total = 0;
    std::vector<std::pair<IntPoly, int>> dist_factors;  // sorted, exponents merged

    bool operator==(const CharIdeal&) const = default;
};

inline CharIdeal char_ideal_symbolic(const ElementaryModule& e) {
    if (e.rank != 0)
        throw validation_error("char_ideal_symbolic: module must be torsion (rank 0)");
    CharIdeal out;
    out.mu_total = mu_invariant(e);
    const Int pm = e.ctx.coeff_modulus();
    for (const auto& fp : e.factors) {
        if (fp.factor.kind == FactorKind::MuPrime) continue;
        IntPoly poly = factor_poly(fp.factor, e.ctx);
        if (fp.factor.kind == FactorKind::Generic) {
            poly = reduce_mod(poly, pm);
            poly.c.resize(static_cast<size_t>(fp.factor.g.degree) + 1);
            poly.c[static_cast<size_t>(fp.factor.g.degree)] = 1;
        }
        out.dist_factors.emplace_back(std::move(poly), fp.exp);
    }
    std::sort(out.dist_factors.begin(), out.dist_factors.end(),
              [](const auto& x, const auto& y) {
                  if (x.first.degree() != y.first.degree()) return x.first.degree() < y.first.degree();
                  if (x.first.c != y.first.c)
                      return std::lexicographical_compare(x.first.c.begin(), x.first.c.end(),
                                                          y.first.c.begin(), y.first.c.end());
                  return x.second < y.second;
              });
    // merge equal polynomials
    std::vector<std::pair<IntPoly, int>> merged;
    for (auto& df : out.dist_factors) {
        if (!merged.empty() && merged.back().first == df.first)
            merged.back().second += df.second;
        else
            merged.push_back(std::move(df));
    }
    out.dist_factors = std::move(merged);
    return out;
}

/// Messages about Generic factors that coincide mod p^prec; the structure
/// theorem's uniqueness needs them distinct, but that is the caller's contract
/// so this only reports.
inline std::vector<std::string> duplicate_generic_warnings(const ElementaryModule& e) {
    std::vector<std::string> out;
    auto cf = canonical_form(e);
    for (size_t i = 0; i + 1 < cf.factors.size(); ++i) {
        const auto& a = cf.factors[i].factor;
        const auto& b = cf.factors[i + 1].factor;
        if (a.kind == FactorKind::Generic && b.kind == FactorKind::Generic && a.g == b.g)
            out.push_back("generic factors share a representative mod p^prec: " +
                          to_string(a.g.poly));
    }
    return out;
}

/// Balanced representative mod m: coefficients shifted into (-m/2, m/2].
/// Display helper only; canonical data stays in [0, m).
inline IntPoly balanced_mod(const IntPoly& f, const Int& m) {
    IntPoly out = reduce_mod(f, m);
    for (auto& x : out.c)
        if (2 * x > m) x -= m;
    return out;
}

/// Generator rendering for reports: "3^2 * (T^2 + 3T + 3) * (T - 3)^2", or
/// "1" for the unit ideal.
inline std::string to_string(const CharIdeal& c, const PrecisionContext& ctx) {
    std::string s;
    auto append = [&s](const std::string& part) {
        if (!s.empty()) s += " * ";
        s += part;
    };
    if (c.mu_total == 1) append(ctx.prime().str());
    if (c.mu_total > 1) append(ctx.prime().str() + "^" + std::to_string(c.mu_total));
    for (const auto& [poly, exp] : c.dist_factors) {
        std::string part = "(" + to_string(balanced_mod(poly, ctx.coeff_modulus())) + ")";
        if (exp > 1) part += "^" + std::to_string(exp);
        append(part);
    }
    return s.empty() ? "1" : s;
}

/// Short rendering for reports: "L^2 + L/p^2 + L/nu_1 + L/(T - 3)".
inline std::string to_string(const ElementaryModule& e) {
    std::string s;
    auto append = [&s](const std::string& part) {
        if (!s.empty()) s += " + ";
        s += part;
    };
    if (e.rank == 1) append("L");
    if (e.rank > 1) append("L^" + std::to_string(e.rank));
    for (const auto& fp : canonical_form(e).factors) {
        std::string base;
        switch (fp.factor.kind) {
            case FactorKind::MuPrime: base = "p"; break;
            case FactorKind::Cyclotomic: base = "nu_" + std::to_string(fp.factor.level); break;
            case FactorKind::Generic:
                base = "(" + to_string(balanced_mod(fp.factor.g.poly, e.ctx.coeff_modulus())) + ")";
                break;
        }
        std::string part = "L/" + base;
        if (fp.exp > 1) part += "^" + std::to_string(fp.exp);
        append(part);
    }
    return s.empty() ? "0" : s;
}

}  // namespace iwasawa
