#pragma once

#include "iwasawa/elementary.hpp"
#include "iwasawa/int_matrix.hpp"
#include "iwasawa/poly.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace iwasawa {

/// Matrix of multiplication by omega_n on the Z_p-lattice Lambda/f^e (basis
/// 1, T, ..., T^{deg-1}), exact integers. Computed as (1+T)^{p^n} - 1 reduced
/// mod f^e, then shifted down the basis; this equals omega_n evaluated at the
/// companion matrix of f^e. MuPrime factors have no such lattice (Lambda/p^f
/// is not Z_p-free) and return nullopt; callers use the analytic branch.
inline std::optional<IntMatrix> factor_action_matrix(const PrimeFactor& f, int exp, int n,
                                                     const PrecisionContext& ctx) {
    if (exp < 1) throw validation_error("factor_action_matrix: exponent must be >= 1");
    ctx.require_level(n);
    if (f.kind == FactorKind::MuPrime) return std::nullopt;
    IntPoly g = factor_poly(f, ctx);
    IntPoly F = IntPoly::constant(1);
    for (int i = 0; i < exp; ++i) F = F * g;
    const long D = F.degree();
    IntPoly u = powmod_monic(IntPoly{{1, 1}}, int_pow(ctx.prime(), static_cast<unsigned long>(n)), F);
    IntPoly a = u - IntPoly::constant(1);

    IntMatrix m(static_cast<int>(D), static_cast<int>(D));
    IntPoly cur = a;
    for (long j = 0; j < D; ++j) {
        if (j > 0) cur = mulmod_monic(cur, IntPoly{{0, 1}}, F);
        for (long i = 0; i <= cur.degree(); ++i) m.at(static_cast<int>(i), static_cast<int>(j)) = cur.c[static_cast<size_t>(i)];
    }
    return m;
}

/// Invariants of E/omega_n E as a Z_p-module: the free part and the p-primary
/// torsion exponents. Factor contributions: Lambda^r gives free rank r*p^n;
/// Lambda/p^f gives p^n torsion summands of exponent f; polynomial factors go
/// through the action-matrix cokernel (square matrix, so the rows-as-relations
/// convention coincides with the column lattice).
inline FiniteLevelInvariants omega_quotient_invariants(const ElementaryModule& e, int n) {
    const PrecisionContext& ctx = e.ctx;
    ctx.require_level(n);
    FiniteLevelInvariants out;
    out.free_rank = e.rank * ctx.level_size(n);
    for (const auto& fp : e.factors) {
        auto m = factor_action_matrix(fp.factor, fp.exp, n, ctx);
        if (!m) {
            long copies = ctx.level_size(n);
            for (long i = 0; i < copies; ++i) out.torsion_exponents.push_back(fp.exp);
            continue;
        }
        FiniteLevelInvariants inv = cokernel_invariants(*m, ctx.prime());
        out.free_rank += inv.free_rank;
        out.torsion_exponents.insert(out.torsion_exponents.end(), inv.torsion_exponents.begin(),
                                     inv.torsion_exponents.end());
    }
    std::sort(out.torsion_exponents.begin(), out.torsion_exponents.end());
    return out;
}

/// e_n = log_p of the p-primary torsion size of E/omega_n E.
inline long torsion_log_size(const ElementaryModule& e, int n) {
    return omega_quotient_invariants(e, n).torsion_log_size();
}

/// Outcome of chasing the inverse system torsion(E/omega_m E) ->
/// torsion(E/omega_n E) for increasing depth m at a fixed target level n.
struct StabilizationReport {
    int level = 0;
    FiniteLevelInvariants stable_invariants;
    int stabilized_at = 0;  // first depth m with image invariants equal to depth m-1
    bool converged = false;

    bool operator==(const StabilizationReport&) const = default;
};

/// Realizes the level-n layer of the inverse limit: the descending chain of
/// images of torsion(E/omega_m E) inside torsion(E/omega_n E), reported once
/// two consecutive depths agree. The chain lives in a fixed generator space:
/// both quotients share the basis of Lambda/f^e, and omega_m Lambda is inside
/// omega_n Lambda, so the projection is the identity on coordinates. Torsion
/// at depth m is generated by the saturation of the omega_m column lattice.
inline StabilizationReport stabilized_limit_invariants(const ElementaryModule& e, int n) {
    const PrecisionContext& ctx = e.ctx;
    ctx.require_level(n);
    if (n >= ctx.n_cap)
        throw validation_error("stabilized_limit_invariants: need n < n_cap to chase depths");

    std::vector<int> mu_exps;  // MuPrime projections are surjective at every depth
    for (const auto& fp : e.factors)
        if (fp.factor.kind == FactorKind::MuPrime) {
            long copies = ctx.level_size(n);
            for (long i = 0; i < copies; ++i) mu_exps.push_back(fp.exp);
        }

    struct PolyFactor {
        const FactorPower* fp;
        SnfTransforms level_n;  // transforms of the level-n relation matrix
    };
    std::vector<PolyFactor> polys;
    for (const auto& fp : e.factors) {
        if (fp.factor.kind == FactorKind::MuPrime) continue;
        auto mn = factor_action_matrix(fp.factor, fp.exp, n, ctx);
        polys.push_back({&fp, smith_normal_form_with_transforms(*mn)});
    }

    auto image_at = [&](int m) {
        FiniteLevelInvariants inv;
        inv.torsion_exponents = mu_exps;
        for (const auto& pf : polys) {
            if (m == n) {
                // identity map: the full torsion group, read off the level-n SNF
                for (const Int& d : pf.level_n.divisors) {
                    auto v = p_valuation(d, ctx.prime());
                    if (v && *v > 0) inv.torsion_exponents.push_back(static_cast<int>(*v));
                }
                continue;
            }
            auto mm = factor_action_matrix(pf.fp->factor, pf.fp->exp, m, ctx);
            IntMatrix sm = column_saturation_basis(*mm);
            FiniteLevelInvariants img = image_subgroup_invariants(sm, pf.level_n, ctx.prime());
            if (img.free_rank != 0)
                throw consistency_error("stabilized_limit_invariants: torsion image has free part");
            inv.torsion_exponents.insert(inv.torsion_exponents.end(),
                                         img.torsion_exponents.begin(),
                                         img.torsion_exponents.end());
        }
        std::sort(inv.torsion_exponents.begin(), inv.torsion_exponents.end());
        return inv;
    };

    FiniteLevelInvariants prev = image_at(n);
    for (int m = n + 1; m <= ctx.n_cap; ++m) {
        FiniteLevelInvariants cur = image_at(m);
        if (cur == prev) return StabilizationReport{n, cur, m, true};
        prev = cur;
    }
    return StabilizationReport{n, prev, ctx.n_cap, false};
}

}  // namespace iwasawa
