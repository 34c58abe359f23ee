// Arithmetic applications built on the functor layer: splitting a Selmer-type
// module into Mordell-Weil and Sha parts, growth exponents of the finite-level
// torsion, rank sequences and their inverse, the functional-equation
// comparator, and bounded-ratio reports for pairs of torsion modules.
#pragma once

#include <string>
#include <vector>

#include "iwasawa/functors.hpp"

namespace iwasawa {

/// e_n = p^n*mu + n*lambda + nu holds exactly for n in [n0, n_cap].
struct GrowthFit {
    long mu = 0;
    long lambda = 0;
    long nu = 0;
    int n0 = 0;

    bool operator==(const GrowthFit&) const = default;
};

/// Z-ranks of the level-n layers, indexed by n starting at 0.
/// Valid sequences are nondecreasing with rank_n - rank_{n-1} divisible by
/// p^{n-1}(p-1).
struct RankSequence {
    Int p = 3;
    std::vector<long> ranks;

    bool operator==(const RankSequence&) const = default;
};

enum class DisassemblyMode { Strict, Extended };

inline std::string to_string(DisassemblyMode m) {
    return m == DisassemblyMode::Strict ? "strict" : "extended";
}

struct DisassemblyResult {
    ElementaryModule e_mw;
    ElementaryModule e_sha;
    DisassemblyMode mode = DisassemblyMode::Strict;
};

/// Splits a Selmer-type module: the Sha side is the stabilized limit
/// (exponents of tower factors drop by one, everything coprime to the tower
/// survives unchanged, rank is forgotten), while the Mordell-Weil side keeps
/// the free rank plus one exponent-1 copy of each tower factor.  Mu-power and
/// generic factors never reach the Mordell-Weil side.
///
/// Strict mode refuses level-0 tower factors (powers of T); extended mode
/// applies the same exponent bookkeeping to them.
inline DisassemblyResult disassemble_selmer(const ElementaryModule& e_sel,
                                            DisassemblyMode mode = DisassemblyMode::Strict) {
    if (mode == DisassemblyMode::Strict) {
        for (const auto& fp : e_sel.factors)
            if (fp.factor.kind == FactorKind::Cyclotomic && fp.factor.level == 0)
                throw validation_error(
                    "disassemble_selmer: level-0 factor requires extended mode");
    }
    DisassemblyResult out;
    out.mode = mode;
    out.e_sha = G_closed(e_sel);
    std::vector<FactorPower> mw;
    for (const auto& fp : e_sel.factors)
        if (fp.factor.kind == FactorKind::Cyclotomic) mw.push_back({fp.factor, 1});
    out.e_mw = canonical_form(make_elementary(e_sel.ctx, e_sel.rank, std::move(mw)));
    return out;
}

/// True iff every torsion factor is a level >= 1 tower factor with exponent 1,
/// the shape a Mordell-Weil side is allowed to have.  Level-0 factors fail
/// this check; use mw_level0_ambiguous to distinguish them from outright
/// malformed inputs.
inline bool validate_mw_structure(const ElementaryModule& e) {
    for (const auto& fp : e.factors) {
        if (fp.factor.kind != FactorKind::Cyclotomic) return false;
        if (fp.exp != 1) return false;
        if (fp.factor.level < 1) return false;
    }
    return true;
}

/// True iff the module would pass validate_mw_structure except that some
/// factor sits at level 0.  Whether such factors can occur on the
/// Mordell-Weil side is left undecided; callers should surface this case
/// rather than silently accepting or rejecting it.
inline bool mw_level0_ambiguous(const ElementaryModule& e) {
    bool saw_level0 = false;
    for (const auto& fp : e.factors) {
        if (fp.factor.kind != FactorKind::Cyclotomic || fp.exp != 1) return false;
        if (fp.factor.level < 1) saw_level0 = true;
    }
    return saw_level0;
}

inline bool is_cotorsion(const ElementaryModule& e) { return e.rank == 0; }

/// Exact growth exponents of the finite-level torsion.  mu and lambda come
/// from the stabilized limit; nu and the threshold n0 are fitted against the
/// computed level sizes.  A failure to fit is a library bug, not bad input,
/// hence consistency_error.
inline GrowthFit growth_fit(const ElementaryModule& e) {
    auto d = detail::fit_growth(e);
    if (d.n0 > e.ctx.n_cap - 1)
        throw consistency_error("growth_fit: no tail of levels fits e_n = p^n*mu + n*lambda + nu");
    return GrowthFit{d.mu, d.lambda, d.nu, d.n0};
}

/// Level ranks of a Mordell-Weil-shaped module: the free part contributes
/// r*p^n and each tower factor at level k contributes its full degree
/// p^{k-1}(p-1) from level k on.  Accepts level-0 factors (degree 1,
/// contributing from level 0) so extended-mode outputs can be charted too.
inline RankSequence rank_sequence_from_mw(const ElementaryModule& e_mw) {
    for (const auto& fp : e_mw.factors)
        if (fp.factor.kind != FactorKind::Cyclotomic || fp.exp != 1)
            throw validation_error(
                "rank_sequence_from_mw: torsion must consist of exponent-1 tower factors");
    RankSequence rs;
    rs.p = e_mw.ctx.prime();
    for (int n = 0; n <= e_mw.ctx.n_cap; ++n) {
        Int r = Int(e_mw.rank) * int_pow(rs.p, static_cast<unsigned long>(n));
        for (const auto& fp : e_mw.factors)
            if (fp.factor.level <= n) r += factor_degree(fp.factor, e_mw.ctx);
        rs.ranks.push_back(r.convert_to<long>());
    }
    return rs;
}

/// Inverse of rank_sequence_from_mw.  The free rank is read off the deepest
/// difference (so the data must extend past the last level where new torsion
/// appears); each earlier difference then yields the multiplicity of tower
/// factors at that level.  Non-integral or negative multiplicities, or a
/// level-0 rank that disagrees with the inferred free rank, mean the sequence
/// is not realizable and raise validation_error.
inline ElementaryModule mw_from_rank_sequence(const RankSequence& rs,
                                              const PrecisionContext& ctx) {
    if (rs.p != ctx.prime())
        throw validation_error("mw_from_rank_sequence: sequence prime differs from context");
    if (rs.ranks.size() < 2)
        throw validation_error(
            "mw_from_rank_sequence: need at least two levels to determine the free rank");
    const std::size_t top = rs.ranks.size() - 1;
    auto step_unit = [&](std::size_t n) {
        return int_pow(rs.p, static_cast<unsigned long>(n - 1)) * (rs.p - 1);
    };
    const Int d_top = Int(rs.ranks[top]) - rs.ranks[top - 1];
    const Int unit_top = step_unit(top);
    if (d_top < 0 || d_top % unit_top != 0)
        throw validation_error(
            "mw_from_rank_sequence: deepest difference is not a multiple of p^{n-1}(p-1)");
    const Int r = d_top / unit_top;
    std::vector<FactorPower> factors;
    for (std::size_t n = 1; n < top; ++n) {
        const Int d = Int(rs.ranks[n]) - rs.ranks[n - 1];
        const Int unit = step_unit(n);
        if (d % unit != 0)
            throw validation_error(
                "mw_from_rank_sequence: difference at level " + std::to_string(n) +
                " is not a multiple of p^{n-1}(p-1)");
        const Int a = d / unit - r;
        if (a < 0)
            throw validation_error("mw_from_rank_sequence: negative multiplicity at level " +
                                   std::to_string(n));
        for (Int i = 0; i < a; ++i)
            factors.push_back({cyclotomic_factor(static_cast<int>(n)), 1});
    }
    if (rs.ranks[0] != r)
        throw validation_error(
            "mw_from_rank_sequence: level-0 rank disagrees with the inferred free rank");
    return canonical_form(make_elementary(ctx, r.convert_to<long>(), std::move(factors)));
}

/// True iff the first module is the involution twist of the second, i.e. the
/// two sides satisfy the algebraic functional equation on the nose.
inline bool functional_equation_check(const ElementaryModule& e_a,
                                      const ElementaryModule& e_at) {
    if (e_a.ctx != e_at.ctx)
        throw validation_error("functional_equation_check: contexts differ");
    return canonical_form(e_a) == iota_twist_module(e_at);
}

/// Comparison of two torsion modules at every level.  invariants_equal means
/// the growth exponents mu and lambda agree, in which case the level deltas
/// are constant from stable_from on and ratio_bound_exp = |nu_a - nu_b|; the
/// size ratio at level n is p^{per_level_delta[n]}, bounded by
/// p^{ratio_bound_exp} for n >= stable_from.
struct ShaComparison {
    bool invariants_equal = false;
    long ratio_bound_exp = 0;
    int stable_from = 0;
    std::vector<long> per_level_delta;
};

inline ShaComparison sha_comparison(const ElementaryModule& e_sha_a,
                                    const ElementaryModule& e_sha_b) {
    if (e_sha_a.ctx != e_sha_b.ctx)
        throw validation_error("sha_comparison: contexts differ");
    if (e_sha_a.rank != 0 || e_sha_b.rank != 0)
        throw validation_error("sha_comparison: inputs must be torsion modules");
    const auto fit_a = growth_fit(e_sha_a);
    const auto fit_b = growth_fit(e_sha_b);
    ShaComparison out;
    out.invariants_equal = fit_a.mu == fit_b.mu && fit_a.lambda == fit_b.lambda;
    out.stable_from = std::max(fit_a.n0, fit_b.n0);
    for (int n = 0; n <= e_sha_a.ctx.n_cap; ++n)
        out.per_level_delta.push_back(torsion_log_size(e_sha_a, n) -
                                      torsion_log_size(e_sha_b, n));
    for (int n = out.stable_from; n <= e_sha_a.ctx.n_cap; ++n) {
        long a = out.per_level_delta[static_cast<std::size_t>(n)];
        if (a < 0) a = -a;
        if (a > out.ratio_bound_exp) out.ratio_bound_exp = a;
    }
    return out;
}

}  // namespace iwasawa
