#pragma once

#include "errors.hpp"
#include "hp_float.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace packsdp {

namespace num {
inline double abs(double x) { return std::fabs(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline HpFloat abs(const HpFloat& x) { return packsdp::abs(x); }
inline HpFloat sqrt(const HpFloat& x) { return packsdp::sqrt(x); }

template <class T>
T zero_like(long prec);
template <>
inline double zero_like<double>(long) { return 0.0; }
template <>
inline HpFloat zero_like<HpFloat>(long prec) { return HpFloat(prec); }

template <class T>
T from_double(double x, long prec);
template <>
inline double from_double<double>(double x, long) { return x; }
template <>
inline HpFloat from_double<HpFloat>(double x, long prec) { return HpFloat(x, prec); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const HpFloat& x) { return x.is_zero(); }
inline double to_double(double x) { return x; }
inline double to_double(const HpFloat& x) { return x.to_double(); }
inline long precision_of(double) { return 53; }
inline long precision_of(const HpFloat& x) { return x.precision(); }
} // namespace num

// Dense row-major matrix over double or HpFloat.
template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, long prec = HpFloat::default_precision)
        : rows_(rows), cols_(cols), prec_(prec), e_(static_cast<std::size_t>(rows) * cols, num::zero_like<T>(prec)) {}

    static DenseMatrix identity(int n, long prec = HpFloat::default_precision) {
        DenseMatrix m(n, n, prec);
        for (int i = 0; i < n; ++i) m(i, i) = num::from_double<T>(1.0, prec);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long precision() const { return prec_; }
    T& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    std::vector<T>& data() { return e_; }
    const std::vector<T>& data() const { return e_; }

    T norm_inf() const {
        T best = num::zero_like<T>(prec_);
        for (int i = 0; i < rows_; ++i) {
            T s = num::zero_like<T>(prec_);
            for (int j = 0; j < cols_; ++j) s += num::abs((*this)(i, j));
            if (s > best) best = s;
        }
        return best;
    }
    T max_abs() const {
        T best = num::zero_like<T>(prec_);
        for (auto& x : e_) {
            T a = num::abs(x);
            if (a > best) best = a;
        }
        return best;
    }
    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_, prec_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    void symmetrize() {
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j) {
                T m = ((*this)(i, j) + (*this)(j, i)) / 2L;
                (*this)(i, j) = m;
                (*this)(j, i) = m;
            }
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        DenseMatrix c(a.rows_, b.cols_, std::max(a.prec_, b.prec_));
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const T& x = a(i, k);
                if (num::is_zero(x)) continue;
                for (int j = 0; j < b.cols_; ++j) fma_into(c(i, j), x, b(k, j));
            }
        return c;
    }
    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
        for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] += b.e_[i];
        return a;
    }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
        for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] -= b.e_[i];
        return a;
    }
    DenseMatrix& operator*=(const T& s) {
        for (auto& x : e_) x *= s;
        return *this;
    }

private:
    static void fma_into(double& acc, double a, double b) { acc += a * b; }
    static void fma_into(HpFloat& acc, const HpFloat& a, const HpFloat& b) { acc.add_mul(a, b); }

    int rows_ = 0, cols_ = 0;
    long prec_ = HpFloat::default_precision;
    std::vector<T> e_;
};

using HpMatrix = DenseMatrix<HpFloat>;

template <class T>
struct EigenResult {
    std::vector<T> values;     // ascending
    DenseMatrix<T> vectors;    // columns
};

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
template <class T>
EigenResult<T> sym_eigen(const DenseMatrix<T>& M, bool check_symmetry = true) {
    int n = M.rows();
    if (n != M.cols()) throw std::invalid_argument("sym_eigen: matrix not square");
    long prec = M.precision();
    if constexpr (std::is_same_v<T, double>) prec = 53;
    T nrm = M.norm_inf();
    if (check_symmetry) {
        T asym = num::zero_like<T>(prec);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                T d = num::abs(M(i, j) - M(j, i));
                if (d > asym) asym = d;
            }
        T tol;
        if constexpr (std::is_same_v<T, HpFloat>) tol = nrm * pow2(-prec / 4, prec);
        else tol = nrm * std::pow(2.0, -static_cast<double>(prec) / 4);
        if (asym > tol) throw NotSymmetric("asymmetry " + std::to_string(num::to_double(asym)));
    }
    DenseMatrix<T> a = M;
    a.symmetrize();
    DenseMatrix<T> V = DenseMatrix<T>::identity(n, prec);
    T eps;
    if constexpr (std::is_same_v<T, HpFloat>) eps = pow2(-prec, prec);
    else eps = std::ldexp(1.0, -52);
    T one = num::from_double<T>(1.0, prec);
    T scale = num::zero_like<T>(prec);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale += a(i, j) * a(i, j);
    T tiny = scale * eps * eps;
    for (int sweep = 0; sweep < 100; ++sweep) {
        T off = num::zero_like<T>(prec);
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= tiny || off == num::zero_like<T>(prec)) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                T apq = a(p, q);
                if (apq * apq <= tiny / static_cast<long>(n * n + 1)) {
                    a(p, q) = num::zero_like<T>(prec);
                    a(q, p) = num::zero_like<T>(prec);
                    continue;
                }
                T theta = (a(q, q) - a(p, p)) / (apq * 2L);
                T t = one / (num::abs(theta) + num::sqrt(theta * theta + one));
                if (theta < num::zero_like<T>(prec)) t = -t;
                T c = one / num::sqrt(t * t + one);
                T s = t * c;
                T tau = s / (one + c);
                T h = t * apq;
                a(p, p) -= h;
                a(q, q) += h;
                a(p, q) = num::zero_like<T>(prec);
                a(q, p) = num::zero_like<T>(prec);
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    T g = a(r, p), hh = a(r, q);
                    T np = g - s * (hh + tau * g);
                    T nq = hh + s * (g - tau * hh);
                    a(r, p) = np;
                    a(p, r) = np;
                    a(r, q) = nq;
                    a(q, r) = nq;
                }
                for (int r = 0; r < n; ++r) {
                    T g = V(r, p), hh = V(r, q);
                    V(r, p) = g - s * (hh + tau * g);
                    V(r, q) = hh + s * (g - tau * hh);
                }
            }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    EigenResult<T> res;
    res.vectors = DenseMatrix<T>(n, n, prec);
    for (int k = 0; k < n; ++k) {
        res.values.push_back(a(idx[k], idx[k]));
        for (int r = 0; r < n; ++r) res.vectors(r, k) = V(r, idx[k]);
    }
    return res;
}

struct NearKernel {
    HpMatrix basis;                   // columns
    std::vector<HpFloat> eigenvalues; // the near-zero ones
    HpFloat threshold;
    HpFloat smallest_kept;            // smallest |eigenvalue| above the threshold, 0 if none
    int dim() const { return basis.cols(); }
};

inline NearKernel numerical_kernel(const HpMatrix& M, const HpFloat& threshold) {
    if (threshold.sign() <= 0) throw std::invalid_argument("numerical_kernel: threshold must be positive");
    auto eig = sym_eigen(M);
    int n = M.rows();
    std::vector<int> keep;
    for (int k = 0; k < n; ++k) {
        HpFloat a = abs(eig.values[k]);
        if (a >= threshold / 2L && a < threshold * 2L)
            throw ThresholdAmbiguous("eigenvalue " + eig.values[k].to_string(8) + " near threshold " +
                                     threshold.to_string(8));
        if (a < threshold) keep.push_back(k);
    }
    NearKernel nk;
    nk.threshold = threshold;
    nk.smallest_kept = HpFloat(M.precision());
    for (int k = 0; k < n; ++k) {
        HpFloat a = abs(eig.values[k]);
        if (a >= threshold && (nk.smallest_kept.is_zero() || a < nk.smallest_kept)) nk.smallest_kept = a;
    }
    nk.basis = HpMatrix(n, static_cast<int>(keep.size()), M.precision());
    for (std::size_t c = 0; c < keep.size(); ++c) {
        nk.eigenvalues.push_back(eig.values[keep[c]]);
        for (int r = 0; r < n; ++r) nk.basis(r, static_cast<int>(c)) = eig.vectors(r, keep[c]);
    }
    return nk;
}

// Default kernel threshold 2^(-prec/2) * ||M||_inf.
inline HpFloat default_kernel_threshold(const HpMatrix& M) {
    HpFloat nrm = M.norm_inf();
    if (nrm.is_zero()) nrm = HpFloat(1L, M.precision());
    return nrm * pow2(-M.precision() / 2, M.precision());
}

// Cholesky factor L (lower) with A = L L^T; returns false if A is not numerically positive definite.
template <class T>
bool cholesky(const DenseMatrix<T>& A, DenseMatrix<T>& L) {
    int n = A.rows();
    long prec = A.precision();
    L = DenseMatrix<T>(n, n, prec);
    for (int j = 0; j < n; ++j) {
        T s = A(j, j);
        for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
        if (!(s > num::zero_like<T>(prec))) return false;
        T d = num::sqrt(s);
        L(j, j) = d;
        for (int i = j + 1; i < n; ++i) {
            T x = A(i, j);
            for (int k = 0; k < j; ++k) {
                if constexpr (std::is_same_v<T, HpFloat>) x.sub_mul(L(i, k), L(j, k));
                else x -= L(i, k) * L(j, k);
            }
            L(i, j) = x / d;
        }
    }
    return true;
}

// Solve L L^T x = b in place.
template <class T>
void cholesky_solve(const DenseMatrix<T>& L, std::vector<T>& b) {
    int n = L.rows();
    for (int i = 0; i < n; ++i) {
        T x = b[i];
        for (int k = 0; k < i; ++k) {
            if constexpr (std::is_same_v<T, HpFloat>) x.sub_mul(L(i, k), b[k]);
            else x -= L(i, k) * b[k];
        }
        b[i] = x / L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        T x = b[i];
        for (int k = i + 1; k < n; ++k) {
            if constexpr (std::is_same_v<T, HpFloat>) x.sub_mul(L(k, i), b[k]);
            else x -= L(k, i) * b[k];
        }
        b[i] = x / L(i, i);
    }
}

// Inverse of a lower triangular matrix.
template <class T>
DenseMatrix<T> lower_inverse(const DenseMatrix<T>& L) {
    int n = L.rows();
    DenseMatrix<T> R(n, n, L.precision());
    T one = num::from_double<T>(1.0, L.precision());
    for (int j = 0; j < n; ++j) {
        R(j, j) = one / L(j, j);
        for (int i = j + 1; i < n; ++i) {
            T s = num::zero_like<T>(L.precision());
            for (int k = j; k < i; ++k) {
                if constexpr (std::is_same_v<T, HpFloat>) s.add_mul(L(i, k), R(k, j));
                else s += L(i, k) * R(k, j);
            }
            R(i, j) = -s / L(i, i);
        }
    }
    return R;
}

inline DenseMatrix<double> to_double_matrix(const HpMatrix& M) {
    DenseMatrix<double> D(M.rows(), M.cols(), 53);
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) D(i, j) = M(i, j).to_double();
    return D;
}

} // namespace packsdp
