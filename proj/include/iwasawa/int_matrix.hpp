#pragma once

#include "iwasawa/bigint.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace iwasawa {

/// Dense matrix of exact integers, row-major. All algorithms here are exact:
/// intermediate entry growth is tolerated, never truncated.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c)) {
        if (r < 0 || c < 0) throw validation_error("IntMatrix: negative dimensions");
    }

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    Int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const Int& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const IntMatrix&) const = default;
};

inline IntMatrix multiply(const IntMatrix& x, const IntMatrix& y) {
    if (x.cols != y.rows) throw validation_error("matrix multiply: dimension mismatch");
    IntMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Int& xik = x.at(i, k);
            if (xik == 0) continue;
            for (int j = 0; j < y.cols; ++j) {
                const Int& ykj = y.at(k, j);
                if (ykj != 0) r.at(i, j) += xik * ykj;
            }
        }
    return r;
}

inline IntMatrix transpose(const IntMatrix& m) {
    IntMatrix r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
    return r;
}

/// Smith normal form data: the nonzero diagonal divisors in divisibility order
/// (d_i | d_{i+1}, all positive) and the rank. Divisors beyond the rank are
/// zero and therefore not stored.
struct SnfResult {
    std::vector<Int> divisors;
    int rank = 0;
};

/// Smith normal form together with the unimodular transforms:
/// u * m * v = diag(divisors), and u_inv = u^{-1}.
struct SnfTransforms {
    std::vector<Int> divisors;
    int rank = 0;
    IntMatrix u;
    IntMatrix u_inv;
    IntMatrix v;
};

/// Free rank and p-power torsion exponents of a finitely generated abelian
/// group; the invariant data of one finite-level quotient E/omega_n E.
struct FiniteLevelInvariants {
    long free_rank = 0;
    std::vector<int> torsion_exponents;  // sorted ascending

    bool operator==(const FiniteLevelInvariants&) const = default;

    long torsion_log_size() const {
        long s = 0;
        for (int e : torsion_exponents) s += e;
        return s;
    }
};

namespace detail {

// Row/column reduction to Smith normal form. Pivoting picks the smallest
// nonzero entry; after each pivot the divisibility sweep guarantees the pivot
// divides the whole remaining submatrix, so the divisor chain needs no
// separate fix-up pass.
class SnfEngine {
  public:
    SnfEngine(const IntMatrix& m, bool track) : d_(m), track_(track) {
        if (track_) {
            u_ = IntMatrix::identity(m.rows);
            uinv_ = IntMatrix::identity(m.rows);
            v_ = IntMatrix::identity(m.cols);
        }
    }

    void run() {
        const int limit = std::min(d_.rows, d_.cols);
        int t = 0;
        while (t < limit) {
            if (!move_pivot(t)) break;
            reduce_at(t);
            if (d_.at(t, t) < 0) negate_row(t);
            divisors_.push_back(d_.at(t, t));
            ++t;
        }
        rank_ = t;
    }

    SnfResult result() && { return SnfResult{std::move(divisors_), rank_}; }

    SnfTransforms transforms() && {
        return SnfTransforms{std::move(divisors_), rank_, std::move(u_), std::move(uinv_),
                             std::move(v_)};
    }

  private:
    // Locate a nonzero entry of minimal magnitude in the submatrix [t..,t..]
    // and swap it into the pivot position. False if the submatrix is zero.
    bool move_pivot(int t) {
        int bi = -1, bj = -1;
        for (int i = t; i < d_.rows; ++i)
            for (int j = t; j < d_.cols; ++j) {
                const Int& x = d_.at(i, j);
                if (x == 0) continue;
                if (bi < 0 || abs(x) < abs(d_.at(bi, bj))) {
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) return false;
        if (bi != t) swap_rows(t, bi);
        if (bj != t) swap_cols(t, bj);
        return true;
    }

    void reduce_at(int t) {
        for (;;) {
            bool shrunk = false;
            // Clear column t.
            for (int i = t + 1; i < d_.rows && !shrunk; ++i) {
                if (d_.at(i, t) == 0) continue;
                Int q = d_.at(i, t) / d_.at(t, t);
                if (q != 0) row_axpy(i, t, q);
                if (d_.at(i, t) != 0) {
                    swap_rows(t, i);  // strictly smaller pivot
                    shrunk = true;
                }
            }
            if (shrunk) continue;
            // Clear row t.
            for (int j = t + 1; j < d_.cols && !shrunk; ++j) {
                if (d_.at(t, j) == 0) continue;
                Int q = d_.at(t, j) / d_.at(t, t);
                if (q != 0) col_axpy(j, t, q);
                if (d_.at(t, j) != 0) {
                    swap_cols(t, j);
                    shrunk = true;
                }
            }
            if (shrunk) continue;
            // Pivot row and column are clear; enforce pivot | submatrix.
            int bi = -1, bj = -1;
            for (int i = t + 1; i < d_.rows && bi < 0; ++i)
                for (int j = t + 1; j < d_.cols; ++j)
                    if (d_.at(i, j) % d_.at(t, t) != 0) {
                        bi = i;
                        bj = j;
                        break;
                    }
            if (bi < 0) return;
            row_axpy(t, bi, Int(-1));  // row t += row bi, then reduce again
        }
    }

    void swap_rows(int i, int j) {
        for (int c = 0; c < d_.cols; ++c) std::swap(d_.at(i, c), d_.at(j, c));
        if (!track_) return;
        for (int c = 0; c < u_.cols; ++c) std::swap(u_.at(i, c), u_.at(j, c));
        for (int r = 0; r < uinv_.rows; ++r) std::swap(uinv_.at(r, i), uinv_.at(r, j));
    }

    void swap_cols(int i, int j) {
        for (int r = 0; r < d_.rows; ++r) std::swap(d_.at(r, i), d_.at(r, j));
        if (!track_) return;
        for (int r = 0; r < v_.rows; ++r) std::swap(v_.at(r, i), v_.at(r, j));
    }

    // row_i -= q * row_j
    void row_axpy(int i, int j, const Int& q) {
        for (int c = 0; c < d_.cols; ++c) d_.at(i, c) -= q * d_.at(j, c);
        if (!track_) return;
        for (int c = 0; c < u_.cols; ++c) u_.at(i, c) -= q * u_.at(j, c);
        for (int r = 0; r < uinv_.rows; ++r) uinv_.at(r, j) += q * uinv_.at(r, i);
    }

    // col_i -= q * col_j
    void col_axpy(int i, int j, const Int& q) {
        for (int r = 0; r < d_.rows; ++r) d_.at(r, i) -= q * d_.at(r, j);
        if (!track_) return;
        for (int r = 0; r < v_.rows; ++r) v_.at(r, i) -= q * v_.at(r, j);
    }

    void negate_row(int i) {
        for (int c = 0; c < d_.cols; ++c) d_.at(i, c) = -d_.at(i, c);
        if (!track_) return;
        for (int c = 0; c < u_.cols; ++c) u_.at(i, c) = -u_.at(i, c);
        for (int r = 0; r < uinv_.rows; ++r) uinv_.at(r, i) = -uinv_.at(r, i);
    }

    IntMatrix d_;
    bool track_;
    IntMatrix u_, uinv_, v_;
    std::vector<Int> divisors_;
    int rank_ = 0;
};

// Fraction-free Gaussian elimination with full pivoting. Every intermediate
// entry is a minor of the input (up to sign), so sizes stay polynomial where
// naive elimination can blow up. Yields the rank and the final pivot, which
// is a nonzero rank-sized minor; the torsion order of the cokernel divides it.
struct BareissData {
    int rank = 0;
    Int last_pivot = 1;
};

inline BareissData bareiss_rank(IntMatrix a) {
    const int lim = std::min(a.rows, a.cols);
    Int prev = 1;
    int t = 0;
    while (t < lim) {
        int bi = -1, bj = -1;
        for (int i = t; i < a.rows; ++i)
            for (int j = t; j < a.cols; ++j) {
                const Int& x = a.at(i, j);
                if (x == 0) continue;
                if (bi < 0 || abs(x) < abs(a.at(bi, bj))) {
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) break;
        if (bi != t)
            for (int c = 0; c < a.cols; ++c) std::swap(a.at(t, c), a.at(bi, c));
        if (bj != t)
            for (int r = 0; r < a.rows; ++r) std::swap(a.at(r, t), a.at(r, bj));
        const Int piv = a.at(t, t);
        for (int i = t + 1; i < a.rows; ++i)
            for (int j = t + 1; j < a.cols; ++j)
                a.at(i, j) = (piv * a.at(i, j) - a.at(i, t) * a.at(t, j)) / prev;
        prev = piv;
        ++t;
    }
    return BareissData{t, t == 0 ? Int(1) : prev};
}

// Diagonalization of m over Z/p^B. The ring is local, so a minimal-valuation
// pivot clears its row and column with exact multipliers and no entry ever
// leaves [0, p^B). Returns one valuation per generator (= column of m), in
// the order produced; B stands for "zero mod p^B".
inline std::vector<int> local_cokernel_exponents(const IntMatrix& m, const Int& p, int bound) {
    const Int q = int_pow(p, static_cast<unsigned long>(bound));
    IntMatrix a(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) a.at(i, j) = mod_floor(m.at(i, j), q);
    auto vp = [&](const Int& x) {
        if (x == 0) return bound;
        int v = 0;
        Int y = x;
        while (v < bound && y % p == 0) {
            y /= p;
            ++v;
        }
        return v;
    };
    const int lim = std::min(a.rows, a.cols);
    std::vector<int> out;
    int t = 0;
    while (t < lim) {
        int bi = -1, bj = -1, bv = bound;
        for (int i = t; i < a.rows; ++i)
            for (int j = t; j < a.cols; ++j) {
                int v = vp(a.at(i, j));
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) break;
        if (bi != t)
            for (int c = 0; c < a.cols; ++c) std::swap(a.at(t, c), a.at(bi, c));
        if (bj != t)
            for (int r = 0; r < a.rows; ++r) std::swap(a.at(r, t), a.at(r, bj));
        const Int scale = int_pow(p, static_cast<unsigned long>(bv));
        const Int uinv = mod_inverse(a.at(t, t) / scale, q);
        for (int i = t + 1; i < a.rows; ++i) {
            if (a.at(i, t) == 0) continue;
            const Int mult = mod_floor(a.at(i, t) / scale * uinv, q);
            if (mult == 0) continue;
            for (int c = t; c < a.cols; ++c) a.at(i, c) = mod_floor(a.at(i, c) - mult * a.at(t, c), q);
        }
        for (int j = t + 1; j < a.cols; ++j) {
            if (a.at(t, j) == 0) continue;
            const Int mult = mod_floor(a.at(t, j) / scale * uinv, q);
            if (mult == 0) continue;
            for (int r = t; r < a.rows; ++r) a.at(r, j) = mod_floor(a.at(r, j) - mult * a.at(r, t), q);
        }
        out.push_back(bv);
        ++t;
    }
    out.resize(static_cast<size_t>(m.cols), bound);
    return out;
}

}  // namespace detail

inline SnfResult smith_normal_form(const IntMatrix& m) {
    detail::SnfEngine e(m, /*track=*/false);
    e.run();
    return std::move(e).result();
}

inline SnfTransforms smith_normal_form_with_transforms(const IntMatrix& m) {
    detail::SnfEngine e(m, /*track=*/true);
    e.run();
    return std::move(e).transforms();
}

/// Invariants of the abelian group presented on `m.cols` generators with the
/// rows of `m` as relations: free rank plus the p-primary torsion exponents.
/// Prime-to-p torsion is discarded by design (the p-adic picture only sees
/// the p-primary part).
inline FiniteLevelInvariants cokernel_invariants(const IntMatrix& m, const Int& p) {
    if (!is_odd_prime(p)) throw validation_error("cokernel_invariants: p must be an odd prime");
    // Exact rank and minor bound first, then the p-primary part mod p^bound.
    // The torsion order divides the Bareiss minor, so the bound is safe.
    const auto bar = detail::bareiss_rank(m);
    FiniteLevelInvariants out;
    out.free_rank = m.cols - bar.rank;
    if (bar.rank == 0) return out;
    const int bound = static_cast<int>(*p_valuation(bar.last_pivot, p)) + 1;
    long free_seen = 0;
    for (int v : detail::local_cokernel_exponents(m, p, bound)) {
        if (v >= bound)
            ++free_seen;
        else if (v > 0)
            out.torsion_exponents.push_back(v);
    }
    if (free_seen != out.free_rank)
        throw consistency_error("cokernel_invariants: local reduction disagrees with exact rank");
    std::sort(out.torsion_exponents.begin(), out.torsion_exponents.end());
    return out;
}

/// Basis of the right kernel {x : m x = 0}, as matrix columns. The basis spans
/// a direct summand of Z^cols (it is saturated).
inline IntMatrix kernel_basis(const IntMatrix& m) {
    SnfTransforms t = smith_normal_form_with_transforms(m);
    IntMatrix k(m.cols, m.cols - t.rank);
    for (int j = t.rank; j < m.cols; ++j)
        for (int i = 0; i < m.cols; ++i) k.at(i, j - t.rank) = t.v.at(i, j);
    return k;
}

/// Basis of the saturation of the column lattice of m inside Z^rows, i.e. of
/// {x : k x in col(m) for some k != 0}. Columns of the result.
inline IntMatrix column_saturation_basis(const IntMatrix& m) {
    SnfTransforms t = smith_normal_form_with_transforms(m);
    IntMatrix s(m.rows, t.rank);
    for (int j = 0; j < t.rank; ++j)
        for (int i = 0; i < m.rows; ++i) s.at(i, j) = t.u_inv.at(i, j);
    return s;
}

/// Membership test c in col(m), using precomputed transforms of m.
inline bool in_column_lattice(const SnfTransforms& t, const std::vector<Int>& c) {
    const int rows = t.u.rows;
    if (static_cast<int>(c.size()) != rows)
        throw validation_error("in_column_lattice: dimension mismatch");
    for (int i = 0; i < rows; ++i) {
        Int w = 0;
        for (int k = 0; k < rows; ++k) w += t.u.at(i, k) * c[k];
        if (i < t.rank) {
            if (w % t.divisors[i] != 0) return false;
        } else if (w != 0) {
            return false;
        }
    }
    return true;
}

/// Invariants of the subgroup of Z^d / col(rel) generated by the columns of
/// gens, where rel is given by its precomputed SNF transforms. The subgroup H
/// is presented as Z^gens.cols / { a : gens*a in col(rel) }; that relation
/// lattice is extracted from a kernel computation and fed back through SNF.
inline FiniteLevelInvariants image_subgroup_invariants(const IntMatrix& gens,
                                                       const SnfTransforms& tr, const Int& p) {
    if (gens.rows != tr.u.rows) throw validation_error("image_subgroup_invariants: row mismatch");
    const int d = tr.u.rows;
    const int s = gens.cols;
    // Coordinates after u: relation lattice becomes diag(divisors) ++ zero rows.
    IntMatrix w = multiply(tr.u, gens);
    IntMatrix aug(d, s + tr.rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < s; ++j) aug.at(i, j) = w.at(i, j);
    for (int i = 0; i < tr.rank; ++i) aug.at(i, s + i) = tr.divisors[i];
    IntMatrix ker = kernel_basis(aug);
    // Project kernel vectors to the gens-coefficient block: these generate the
    // relation lattice of H on s generators.
    IntMatrix relations(ker.cols, s);  // rows as relations
    for (int j = 0; j < ker.cols; ++j)
        for (int i = 0; i < s; ++i) relations.at(j, i) = ker.at(i, j);
    return cokernel_invariants(relations, p);
}

inline FiniteLevelInvariants image_subgroup_invariants(const IntMatrix& gens, const IntMatrix& rel,
                                                       const Int& p) {
    if (gens.rows != rel.rows) throw validation_error("image_subgroup_invariants: row mismatch");
    return image_subgroup_invariants(gens, smith_normal_form_with_transforms(rel), p);
}

}  // namespace iwasawa
