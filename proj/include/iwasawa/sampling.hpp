#pragma once

#include "iwasawa/elementary.hpp"

#include <random>
#include <vector>

namespace iwasawa {

/// Deterministic RNG wrapper. std::uniform_int_distribution is
/// implementation-defined, so seeded reports would differ across standard
/// libraries; this keeps byte-identical output everywhere.
class DetRng {
  public:
    explicit DetRng(unsigned long long seed) : eng_(seed) {}

    /// Unbiased uniform value in [0, n).
    unsigned long long below(unsigned long long n) {
        if (n == 0) throw validation_error("DetRng::below: empty range");
        const unsigned long long threshold = (-n) % n;  // 2^64 mod n
        for (;;) {
            unsigned long long x = eng_();
            if (x >= threshold) return x % n;
        }
    }

    bool coin() { return below(2) == 1; }

  private:
    std::mt19937_64 eng_;
};

/// The generic factor shapes of the desk-scale family at prime p:
/// T-p, T+p, T^2+p, T^2+pT+p. At p=3 the last one coincides with nu_1 and is
/// reclassified by classify_distinguished.
inline std::vector<IntPoly> family_generic_shapes(const PrecisionContext& ctx) {
    const Int p = ctx.prime();
    return {IntPoly{{-p, 1}}, IntPoly{{p, 1}}, IntPoly{{p, 0, 1}}, IntPoly{{p, p, 1}}};
}

/// Sort a distinguished polynomial into the factor taxonomy: equal to some
/// nu_k means Cyclotomic(k), otherwise Generic. Exact comparison, so e.g.
/// T^2+3T+3 at p=3 lands on Cyclotomic(1) rather than failing coprimality.
inline PrimeFactor classify_distinguished(DistinguishedPoly g, const PrecisionContext& ctx) {
    for (int k = 0;; ++k) {
        IntPoly nk = detail::cyclotomic_unchecked(ctx.prime(), k);
        if (nk.degree() > g.degree) break;
        if (nk == g.poly) return cyclotomic_factor(k);
    }
    return generic_factor(std::move(g));
}

struct FamilyOptions {
    int max_rank = 2;
    int min_factors = 0;
    int max_factors = 4;
    bool allow_mu = true;
    int mu_max_exp = 3;
    bool allow_cyclotomic = true;
    int cyc_min_level = 0;
    int cyc_max_level = 2;
    int cyc_max_exp = 3;
    bool allow_generic = true;
    int generic_max_exp = 1;
};

/// p = 3 (tower depth 4) or p = 5 (tower depth 3), both at precision 8.
inline PrecisionContext sample_context(DetRng& rng) {
    return make_context(rng.coin() ? 5 : 3, 8);
}

inline ElementaryModule sample_module(DetRng& rng, const PrecisionContext& ctx,
                                      const FamilyOptions& opt = {}) {
    std::vector<int> kinds;
    if (opt.allow_mu) kinds.push_back(0);
    if (opt.allow_cyclotomic) kinds.push_back(1);
    if (opt.allow_generic) kinds.push_back(2);
    if (kinds.empty()) throw validation_error("sample_module: no factor kinds enabled");

    long rank = static_cast<long>(rng.below(static_cast<unsigned long long>(opt.max_rank) + 1));
    int nf = opt.min_factors +
             static_cast<int>(rng.below(static_cast<unsigned long long>(opt.max_factors - opt.min_factors) + 1));
    std::vector<FactorPower> factors;
    auto shapes = family_generic_shapes(ctx);
    const int top_level = std::min(opt.cyc_max_level, ctx.n_cap);
    while (static_cast<int>(factors.size()) < nf) {
        switch (kinds[rng.below(kinds.size())]) {
            case 0:
                factors.push_back({mu_prime_factor(),
                                   1 + static_cast<int>(rng.below(static_cast<unsigned long long>(opt.mu_max_exp)))});
                break;
            case 1: {
                int span = top_level - opt.cyc_min_level + 1;
                int level = opt.cyc_min_level + static_cast<int>(rng.below(static_cast<unsigned long long>(span)));
                factors.push_back({cyclotomic_factor(level),
                                   1 + static_cast<int>(rng.below(static_cast<unsigned long long>(opt.cyc_max_exp)))});
                break;
            }
            default: {
                const IntPoly& shape = shapes[rng.below(shapes.size())];
                PrimeFactor f = classify_distinguished(make_distinguished(shape, ctx), ctx);
                if (f.kind == FactorKind::Cyclotomic && !opt.allow_cyclotomic)
                    continue;  // p=3 collision T^2+pT+p = nu_1; redraw
                factors.push_back({std::move(f),
                                   1 + static_cast<int>(rng.below(static_cast<unsigned long long>(opt.generic_max_exp)))});
            }
        }
    }
    return make_elementary(ctx, rank, std::move(factors));
}

/// Valid Mordell-Weil shape: free part plus exponent-1 cyclotomic factors of
/// level >= 1. Levels capped so rank-sequence round trips stay inside the
/// tower bound.
inline ElementaryModule sample_mw_module(DetRng& rng, const PrecisionContext& ctx, int max_level) {
    if (max_level < 1 || max_level > ctx.n_cap)
        throw validation_error("sample_mw_module: bad level bound");
    long rank = static_cast<long>(rng.below(3));
    std::vector<FactorPower> factors;
    for (int level = 1; level <= max_level; ++level) {
        int copies = static_cast<int>(rng.below(3));
        for (int i = 0; i < copies; ++i) factors.push_back({cyclotomic_factor(level), 1});
    }
    return make_elementary(ctx, rank, std::move(factors));
}

/// Random distinguished polynomial of degree in [1, max_deg], coefficients
/// spread over the full precision range.
inline DistinguishedPoly sample_distinguished(DetRng& rng, const PrecisionContext& ctx,
                                              int max_deg) {
    int d = 1 + static_cast<int>(rng.below(static_cast<unsigned long long>(max_deg)));
    Int cap = int_pow(ctx.prime(), static_cast<unsigned long>(ctx.prec - 1));
    std::vector<Int> c(static_cast<size_t>(d) + 1);
    for (int i = 0; i < d; ++i) {
        Int r = static_cast<long long>(rng.below(1u << 30));
        c[static_cast<size_t>(i)] = ctx.prime() * mod_floor(r, cap);
    }
    c[static_cast<size_t>(d)] = 1;
    return make_distinguished(IntPoly{std::move(c)}, ctx);
}

/// Random integer polynomial that is nonzero mod p^prec, for preparation
/// round trips. Mixes plain coefficients with p-power-scaled ones.
inline IntPoly sample_poly_nonzero(DetRng& rng, const PrecisionContext& ctx, int max_deg) {
    for (;;) {
        int d = static_cast<int>(rng.below(static_cast<unsigned long long>(max_deg) + 1));
        std::vector<Int> c(static_cast<size_t>(d) + 1);
        for (auto& x : c) {
            x = static_cast<long long>(rng.below(1u << 30));
            int scale = static_cast<int>(rng.below(static_cast<unsigned long long>(ctx.prec)));
            if (rng.coin()) x *= int_pow(ctx.prime(), static_cast<unsigned long>(scale));
        }
        IntPoly f{std::move(c)};
        if (!reduce_mod(f, ctx.coeff_modulus()).is_zero()) return f;
    }
}

}  // namespace iwasawa
