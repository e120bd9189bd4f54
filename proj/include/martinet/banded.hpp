#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "martinet/errors.hpp"

namespace martinet {

/// Real symmetric banded matrix: main diagonal plus `bw` sub-diagonals.
/// band[j][i] holds A(i+j+1, i), so band[0] is the first sub-diagonal.
struct SymmetricBanded {
    int n = 0;
    int bw = 1;
    std::vector<double> diag;
    std::vector<std::vector<double>> band;

    static SymmetricBanded zero(int n_, int bw_) {
        SymmetricBanded a;
        a.n = n_;
        a.bw = bw_;
        a.diag.assign(n_, 0.0);
        a.band.resize(bw_);
        for (int j = 0; j < bw_; ++j) a.band[j].assign(std::max(0, n_ - j - 1), 0.0);
        return a;
    }

    /// y = A x
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(n, 0.0);
        for (int i = 0; i < n; ++i) y[i] = diag[i] * x[i];
        for (int j = 0; j < bw; ++j)
            for (int i = 0; i + j + 1 < n; ++i) {
                y[i + j + 1] += band[j][i] * x[i];
                y[i] += band[j][i] * x[i + j + 1];
            }
    }

    /// x' A x
    double quadratic_form(const std::vector<double>& x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += diag[i] * x[i] * x[i];
        for (int j = 0; j < bw; ++j)
            for (int i = 0; i + j + 1 < n; ++i) s += 2.0 * band[j][i] * x[i] * x[i + j + 1];
        return s;
    }

    double inf_norm() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = std::abs(diag[i]);
            for (int j = 0; j < bw; ++j) {
                if (i - j - 1 >= 0) r += std::abs(band[j][i - j - 1]);
                if (i + j + 1 < n) r += std::abs(band[j][i]);
            }
            m = std::max(m, r);
        }
        return m;
    }

    void gershgorin(double& lo, double& hi) const {
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (int i = 0; i < n; ++i) {
            double r = 0.0;
            for (int j = 0; j < bw; ++j) {
                if (i - j - 1 >= 0) r += std::abs(band[j][i - j - 1]);
                if (i + j + 1 < n) r += std::abs(band[j][i]);
            }
            lo = std::min(lo, diag[i] - r);
            hi = std::max(hi, diag[i] + r);
        }
    }
};

namespace detail {

/// Inertia count: number of eigenvalues of A strictly below sigma, from the
/// sign pattern of D in the (pivot-free) banded LDL^T of A - sigma I. For
/// bw = 1 this is the classical Sturm sequence.
inline int count_below(const SymmetricBanded& A, double sigma, double pivmin) {
    const int n = A.n, b = A.bw;
    static thread_local std::vector<double> d;
    static thread_local std::vector<std::vector<double>> L;
    d.assign(n, 0.0);
    if (static_cast<int>(L.size()) < b) L.resize(b);
    for (int j = 0; j < b; ++j) L[j].assign(n, 0.0);

    int neg = 0;
    for (int j = 0; j < n; ++j) {
        double dj = A.diag[j] - sigma;
        for (int k = std::max(0, j - b); k < j; ++k) {
            const double ljk = L[j - k - 1][k];
            dj -= ljk * ljk * d[k];
        }
        if (std::abs(dj) < pivmin) dj = (dj < 0.0) ? -pivmin : pivmin;
        d[j] = dj;
        if (dj < 0.0) ++neg;
        for (int i = j + 1; i <= std::min(j + b, n - 1); ++i) {
            double s = (i - j - 1 < b) ? A.band[i - j - 1][j] : 0.0;
            for (int k = std::max(0, i - b); k < j; ++k)
                s -= L[i - k - 1][k] * L[j - k - 1][k] * d[k];
            L[i - j - 1][j] = s / dj;
        }
    }
    return neg;
}

}  // namespace detail

/// Selected eigenvalues (ascending, indices 0..kmax-1) by Sturm-count bisection.
inline std::vector<double> banded_eigenvalues(const SymmetricBanded& A, int kmax) {
    if (kmax < 1 || kmax > A.n) throw domain_error("banded_eigenvalues: bad kmax");
    double glo, ghi;
    A.gershgorin(glo, ghi);
    const double pivmin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon()
                              + 1e-30 * A.inf_norm();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> out(kmax);
    for (int k = 0; k < kmax; ++k) {
        double lo = glo, hi = ghi;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hi - lo <= 4.0 * eps * std::max(std::abs(lo), std::abs(hi)) + 1e-300) break;
            if (detail::count_below(A, mid, pivmin) > k)
                hi = mid;
            else
                lo = mid;
        }
        out[k] = 0.5 * (lo + hi);
    }
    return out;
}

/// LU factorization of a general banded matrix with partial pivoting
/// (kl sub-, ku super-diagonals; fill widens the upper band to kl + ku).
class BandLU {
public:
    BandLU(const SymmetricBanded& A, double shift) : n_(A.n), kl_(A.bw), ku_(2 * A.bw) {
        rows_ = kl_ + ku_ + 1;
        w_.assign(static_cast<std::size_t>(rows_) * n_, 0.0);
        piv_.assign(n_, 0);
        for (int j = 0; j < n_; ++j) {
            at(j, j) = A.diag[j] - shift;
            for (int s = 0; s < A.bw; ++s) {
                if (j + s + 1 < n_) at(j + s + 1, j) = A.band[s][j];
                if (j - s - 1 >= 0) at(j - s - 1, j) = A.band[s][j - s - 1];
            }
        }
        factor();
    }

    void solve(std::vector<double>& x) const {
        for (int j = 0; j < n_; ++j) {
            if (piv_[j] != j) std::swap(x[j], x[piv_[j]]);
            for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i) x[i] -= cat(i, j) * x[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            x[j] /= cat(j, j);
            for (int i = std::max(0, j - ku_); i < j; ++i) x[i] -= cat(i, j) * x[j];
        }
    }

private:
    double& at(int i, int j) { return w_[static_cast<std::size_t>(j) * rows_ + (ku_ + i - j)]; }
    double cat(int i, int j) const {
        return w_[static_cast<std::size_t>(j) * rows_ + (ku_ + i - j)];
    }

    void factor() {
        const double tiny = 1e-300;
        for (int j = 0; j < n_; ++j) {
            int p = j;
            double best = std::abs(at(j, j));
            for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i)
                if (std::abs(at(i, j)) > best) {
                    best = std::abs(at(i, j));
                    p = i;
                }
            piv_[j] = p;
            if (p != j)
                for (int c = j; c <= std::min(n_ - 1, j + ku_); ++c) std::swap(at(j, c), at(p, c));
            double pivot = at(j, j);
            if (std::abs(pivot) < tiny) pivot = at(j, j) = (pivot < 0 ? -tiny : tiny);
            for (int i = j + 1; i <= std::min(j + kl_, n_ - 1); ++i) {
                const double m = at(i, j) / pivot;
                at(i, j) = m;
                if (m != 0.0)
                    for (int c = j + 1; c <= std::min(n_ - 1, j + ku_); ++c)
                        at(i, c) -= m * at(j, c);
            }
        }
    }

    int n_, kl_, ku_, rows_;
    std::vector<double> w_;
    std::vector<int> piv_;
};

/// Inverse iteration for the eigenvector at a converged eigenvalue estimate.
/// Start vector is a fixed LCG stream, so results are fully deterministic.
/// For a matrix symmetric under index reversal, parity_hint (+1 even, -1 odd)
/// projects each iterate onto that parity class; this separates numerically
/// degenerate tunneling doublets, whose members carry opposite parity.
inline std::vector<double> inverse_iteration(const SymmetricBanded& A, double lambda,
                                             const std::vector<std::vector<double>>& orth = {},
                                             int parity_hint = 0) {
    const int n = A.n;
    BandLU lu(A, lambda);
    std::vector<double> v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v[i] = (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.5;
    }
    auto orthogonalize = [&](std::vector<double>& u) {
        for (const auto& q : orth) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += q[i] * u[i];
            for (int i = 0; i < n; ++i) u[i] -= dot * q[i];
        }
    };
    auto norm_of = [&](const std::vector<double>& u) {
        double s = 0.0;
        for (double t : u) s += t * t;
        return std::sqrt(s);
    };
    auto normalize = [&](std::vector<double>& u) {
        const double s = norm_of(u);
        if (s == 0.0) throw solver_error("inverse_iteration: zero vector");
        for (double& t : u) t /= s;
    };
    auto project_parity = [&](std::vector<double>& u) {
        if (parity_hint == 0) return;
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i)
            p[i] = 0.5 * (u[i] + parity_hint * u[n - 1 - i]);
        if (norm_of(p) > 1e-3 * norm_of(u)) u = std::move(p);  // guard a wrong hint
    };
    project_parity(v);
    orthogonalize(v);
    normalize(v);
    for (int it = 0; it < 4; ++it) {
        lu.solve(v);
        project_parity(v);
        orthogonalize(v);
        normalize(v);
    }
    return v;
}

}  // namespace martinet
