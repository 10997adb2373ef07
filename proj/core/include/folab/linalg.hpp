#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "folab/error.hpp"
#include "folab/jet.hpp"

namespace folab {

/// Dense square matrix over any derivative-carrying scalar. Sizes here are
/// chart dimensions (2..4 in practice), so nothing is tuned for large n.
template <class T>
class SquareMat {
public:
    SquareMat() = default;
    explicit SquareMat(int n, T fill = T{}) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

    int size() const { return n_; }
    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

private:
    int n_ = 0;
    std::vector<T> a_;
};

using Mat = SquareMat<double>;

template <class T>
using VecT = std::vector<T>;

/// <u, v> through the (symmetric) metric g.
template <class T>
T metric_inner(const SquareMat<T>& g, const VecT<T>& u, const VecT<T>& v) {
    const int n = g.size();
    T acc = zero_like(g(0, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += g(i, j) * u[i] * v[j];
    return acc;
}

template <class T>
VecT<T> axpy(const VecT<T>& x, const T& a, const VecT<T>& y) {  // x + a*y
    VecT<T> r = x;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += a * y[k];
    return r;
}

/// Solve A x = b by Gaussian elimination with partial pivoting on |value|.
/// Works over jet scalars, so solutions carry exact derivatives.
template <class T>
VecT<T> solve(SquareMat<T> A, VecT<T> b) {
    const int n = A.size();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        auto best = std::abs(value(A(perm[col], col)));
        for (int r = col + 1; r < n; ++r) {
            auto cand = std::abs(value(A(perm[r], col)));
            if (cand > best) { best = cand; piv = r; }
        }
        if (best == 0) throw ScenarioError("singular matrix in linear solve");
        std::swap(perm[col], perm[piv]);
        const T pivot = A(perm[col], col);
        for (int r = col + 1; r < n; ++r) {
            T f = A(perm[r], col) / pivot;
            for (int c = col; c < n; ++c) A(perm[r], c) -= f * A(perm[col], c);
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    VecT<T> x(n, zero_like(b[0]));
    for (int row = n - 1; row >= 0; --row) {
        T acc = b[perm[row]];
        for (int c = row + 1; c < n; ++c) acc -= A(perm[row], c) * x[c];
        x[row] = acc / A(perm[row], row);
    }
    return x;
}

/// Matrix inverse via column-by-column solves.
template <class T>
SquareMat<T> inverse(const SquareMat<T>& A) {
    const int n = A.size();
    SquareMat<T> inv(n, zero_like(A(0, 0)));
    for (int c = 0; c < n; ++c) {
        VecT<T> e(n, zero_like(A(0, 0)));
        e[c] = constant_like(A(0, 0), 1.0);
        VecT<T> x = solve(A, e);
        for (int r = 0; r < n; ++r) inv(r, c) = x[r];
    }
    return inv;
}

/// Determinant (LU with partial pivoting).
template <class T>
T determinant(SquareMat<T> A) {
    const int n = A.size();
    T det = constant_like(A(0, 0), 1.0);
    double sign = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        auto best = std::abs(value(A(col, col)));
        for (int r = col + 1; r < n; ++r) {
            auto cand = std::abs(value(A(r, col)));
            if (cand > best) { best = cand; piv = r; }
        }
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                T tmp = A(col, c);
                A(col, c) = A(piv, c);
                A(piv, c) = tmp;
            }
            sign = -sign;
        }
        if (value(A(col, col)) == 0) return zero_like(det);
        det = det * A(col, col);
        for (int r = col + 1; r < n; ++r) {
            T f = A(r, col) / A(col, col);
            for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
        }
    }
    return det * sign;
}

/// Positive-definiteness test via Cholesky (doubles only).
inline bool is_positive_definite(const Mat& A) {
    const int n = A.size();
    Mat L(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return true;
}

/// Deterministic pairwise-tree summation; reduction order is independent of
/// any parallel evaluation order, keeping reports reproducible.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline long double pairwise_sum(std::span<const long double> xs) {
    if (xs.empty()) return 0.0L;
    if (xs.size() <= 8) {
        long double s = 0.0L;
        for (long double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace folab
