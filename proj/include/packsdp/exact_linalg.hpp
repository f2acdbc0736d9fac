#pragma once

#include "fields.hpp"
#include "polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace packsdp {

template <class F>
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows) * cols, F(0)) {}
    ExactMatrix(int rows, int cols, std::vector<F> entries) : rows_(rows), cols_(cols), e_(std::move(entries)) {
        if (e_.size() != static_cast<std::size_t>(rows) * cols) throw std::invalid_argument("ExactMatrix: entry count");
    }
    ExactMatrix(std::initializer_list<std::initializer_list<F>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
        for (auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("ExactMatrix: ragged rows");
            for (auto& x : r) e_.push_back(x);
        }
    }
    static ExactMatrix identity(int n) {
        ExactMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = F(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    F& operator()(int i, int j) { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    const F& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
    const std::vector<F>& entries() const { return e_; }

    bool is_square() const { return rows_ == cols_; }
    bool is_symmetric() const {
        if (!is_square()) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }
    ExactMatrix transpose() const {
        ExactMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    std::vector<F> operator*(const std::vector<F>& x) const {
        std::vector<F> y(rows_, F(0));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if (!is_zero((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
        return y;
    }
    friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
        ExactMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (is_zero(a(i, k))) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }
    friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<F> e_;
};

template <class F>
struct RrefResult {
    ExactMatrix<F> echelon;
    std::vector<int> pivot_columns;
    int rank = 0;
};

template <class F>
RrefResult<F> rref(const ExactMatrix<F>& A) {
    ExactMatrix<F> m = A;
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int p = -1;
        for (int i = r; i < m.rows(); ++i)
            if (!is_zero(m(i, c))) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        F inv = F(1) / m(r, c);
        for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || is_zero(m(i, c))) continue;
            F f = m(i, c);
            for (int j = c; j < m.cols(); ++j)
                if (!is_zero(m(r, j))) m(i, j) -= f * m(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(piv), r};
}

template <class F>
std::vector<std::vector<F>> nullspace(const ExactMatrix<F>& A) {
    auto R = rref(A);
    std::vector<bool> is_piv(A.cols(), false);
    for (int c : R.pivot_columns) is_piv[c] = true;
    std::vector<std::vector<F>> out;
    for (int f = 0; f < A.cols(); ++f) {
        if (is_piv[f]) continue;
        std::vector<F> v(A.cols(), F(0));
        v[f] = F(1);
        for (int i = 0; i < R.rank; ++i) v[R.pivot_columns[i]] = -R.echelon(i, f);
        out.push_back(std::move(v));
    }
    return out;
}

template <class F>
using SparseRow = std::vector<std::pair<int, F>>;

inline double magnitude(const Rational& q) { return std::fabs(q.get_d()); }
inline double magnitude(const QuadraticNumber& q) { return std::fabs(q.approx(64).to_double()); }

// Incremental sparse row echelon form of a linear system.
// Rows are reduced against earlier pivot rows in insertion order.
template <class F>
class SparseEchelon {
public:
    // sparse_pivots: pivot on the last column of each row instead of the largest entry.
    // Much less fill-in; use it when only the rank or the kept rows matter.
    explicit SparseEchelon(int cols, bool sparse_pivots = false)
        : cols_(cols), sparse_pivots_(sparse_pivots), pivot_of_col_(cols, -1) {}

    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    const std::vector<int>& pivots() const { return pivot_col_; }
    bool is_pivot(int c) const { return pivot_of_col_[c] >= 0; }

    // Returns true if the row was independent; a dependent row with nonzero
    // right-hand side throws Inconsistent.
    bool add_row(SparseRow<F> row, F rhs) {
        std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.first < b.first; });
        std::map<int, F> acc;
        for (auto& [c, x] : row)
            if (!is_zero(x)) acc[c] += x;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            auto it = acc.find(pivot_col_[k]);
            if (it == acc.end()) continue;
            if (is_zero(it->second)) {
                acc.erase(it);
                continue;
            }
            F f = it->second / pivot_val_[k];
            for (auto& [c, x] : rows_[k]) {
                auto jt = acc.find(c);
                if (jt == acc.end()) acc.emplace(c, -(f * x));
                else {
                    jt->second -= f * x;
                    if (is_zero(jt->second)) acc.erase(jt);
                }
            }
            rhs -= f * rhs_[k];
        }
        SparseRow<F> red;
        for (auto& [c, x] : acc)
            if (!is_zero(x)) red.emplace_back(c, x);
        if (red.empty()) {
            if (!is_zero(rhs)) throw Inconsistent("dependent row with nonzero right-hand side (" + exact_str(rhs) + ")");
            return false;
        }
        int best = sparse_pivots_ ? static_cast<int>(red.size()) - 1 : 0;
        double bm = -1;
        for (std::size_t i = 0; i < red.size() && !sparse_pivots_; ++i) {
            double m = magnitude(red[i].second);
            if (m > bm) {
                bm = m;
                best = static_cast<int>(i);
            }
        }
        int pc = red[best].first;
        pivot_of_col_[pc] = static_cast<int>(rows_.size());
        pivot_col_.push_back(pc);
        pivot_val_.push_back(red[best].second);
        rows_.push_back(std::move(red));
        rhs_.push_back(std::move(rhs));
        return true;
    }

    // Fill free coordinates with free_value(c), then back-substitute pivots.
    std::vector<F> solve(const std::function<F(int)>& free_value) const {
        std::vector<F> x(cols_, F(0));
        for (int c = 0; c < cols_; ++c)
            if (pivot_of_col_[c] < 0) x[c] = free_value(c);
        for (std::size_t k = rows_.size(); k-- > 0;) {
            F s = rhs_[k];
            for (auto& [c, a] : rows_[k])
                if (c != pivot_col_[k]) s -= a * x[c];
            x[pivot_col_[k]] = s / pivot_val_[k];
        }
        return x;
    }

private:
    int cols_;
    bool sparse_pivots_ = false;
    std::vector<int> pivot_of_col_;
    std::vector<int> pivot_col_;
    std::vector<F> pivot_val_;
    std::vector<SparseRow<F>> rows_;
    std::vector<F> rhs_;
};

template <class F>
std::vector<F> solve_near_sparse(const std::vector<SparseRow<F>>& rows, const std::vector<F>& b, int cols,
                                 const std::vector<HpFloat>& x_star, const Integer& max_den) {
    SparseEchelon<F> ech(cols);
    for (std::size_t i = 0; i < rows.size(); ++i) ech.add_row(rows[i], b[i]);
    return ech.solve([&](int c) { return F(best_rational_approx(x_star[c], max_den)); });
}

template <class F>
std::vector<F> solve_near(const ExactMatrix<F>& A, const std::vector<F>& b, const std::vector<HpFloat>& x_star,
                          const Integer& max_den) {
    std::vector<SparseRow<F>> rows(A.rows());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (!is_zero(A(i, j))) rows[i].emplace_back(j, A(i, j));
    return solve_near_sparse(rows, b, A.cols(), x_star, max_den);
}

// Coefficients of det(tI - M), low to high, via Berkowitz.
template <class F>
UPoly<F> charpoly(const ExactMatrix<F>& M) {
    int n = M.rows();
    if (n != M.cols()) throw std::invalid_argument("charpoly: matrix not square");
    if (n == 0) return UPoly<F>(F(1));
    std::vector<F> vect{F(1), -M(0, 0)};  // high to low
    for (int k = 1; k < n; ++k) {
        std::vector<F> q{F(1), -M(k, k)};
        std::vector<F> X(k);
        for (int i = 0; i < k; ++i) X[i] = M(i, k);
        for (int j = 0; j < k; ++j) {
            F s(0);
            for (int i = 0; i < k; ++i)
                if (!is_zero(X[i])) s += M(k, i) * X[i];
            q.push_back(-s);
            if (j + 1 < k) {
                std::vector<F> Y(k, F(0));
                for (int i = 0; i < k; ++i)
                    for (int l = 0; l < k; ++l)
                        if (!is_zero(X[l])) Y[i] += M(i, l) * X[l];
                X = std::move(Y);
            }
        }
        std::vector<F> nv(k + 2, F(0));
        for (int i = 0; i < k + 2; ++i)
            for (int j = 0; j <= std::min(i, k); ++j)
                if (i - j < static_cast<int>(q.size()) && !is_zero(vect[j])) nv[i] += q[i - j] * vect[j];
        vect = std::move(nv);
    }
    std::reverse(vect.begin(), vect.end());
    return UPoly<F>(std::move(vect));
}

// Sign test on (-1)^n f(-t): all coefficients must be nonnegative.
template <class F>
bool psd_from_charpoly(const UPoly<F>& f, int n) {
    for (int i = 0; i <= n; ++i) {
        int s = exact_sign(f.coeff(i));
        if ((n - i) % 2 == 1) s = -s;
        if (s < 0) return false;
    }
    return true;
}

template <class F>
bool is_psd_exact(const ExactMatrix<F>& M) {
    if (!M.is_symmetric()) throw std::invalid_argument("is_psd_exact: matrix not symmetric");
    return psd_from_charpoly(charpoly(M), M.rows());
}

} // namespace packsdp
