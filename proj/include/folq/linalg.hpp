// SPDX-License-Identifier: MIT
//
// Small dense matrices over an arbitrary commutative ring scalar, with
// Gaussian elimination that pivots on the magnitude of the scalar's standard
// part.  The scalar type R must provide arithmetic and a free function
// std_part(R) -> double (found by ADL); plain double qualifies below.

#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace folq {

inline double std_part(double x) { return x; }

/// x -= a*b / x += a*b without temporaries; ring scalars overload these.
inline void sub_assign_mul(double& x, double a, double b) { x -= a * b; }
inline void add_assign_mul(double& x, double a, double b) { x += a * b; }

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class R = double>
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    R& operator()(int i, int j) { return a_[i * cols_ + j]; }
    const R& operator()(int i, int j) const { return a_[i * cols_ + j]; }
    std::vector<R>& data() { return a_; }
    const std::vector<R>& data() const { return a_; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = R(1.0);
        return m;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<R> a_;
};

template <class R>
Mat<R> operator*(const Mat<R>& a, const Mat<R>& b) {
    assert(a.cols() == b.rows());
    Mat<R> c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const R& aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) add_assign_mul(c(i, j), aik, b(k, j));
        }
    return c;
}

template <class R>
std::vector<R> mat_vec(const Mat<R>& a, std::span<const R> v) {
    assert(a.cols() == static_cast<int>(v.size()));
    std::vector<R> r(a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) add_assign_mul(r[i], a(i, j), v[j]);
    return r;
}

template <class R>
std::vector<R> mat_vec(const Mat<R>& a, const std::vector<R>& v) {
    return mat_vec(a, std::span<const R>(v));
}

template <class R>
Mat<R> operator-(const Mat<R>& a, const Mat<R>& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    Mat<R> c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

/// LU decomposition with partial pivoting on |standard part|.  Factor once,
/// then back-substitute any number of right-hand sides.
template <class R = double>
class Lu {
  public:
    explicit Lu(Mat<R> m) : lu_(std::move(m)), piv_(lu_.rows()) {
        const int n = lu_.rows();
        assert(n == lu_.cols());
        double scale = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                scale = std::max(scale, std::abs(std_part(lu_(i, j))));
        const double tol = 1e-12 * std::max(1.0, scale);
        for (int col = 0; col < n; ++col) {
            int best = col;
            double mag = std::abs(std_part(lu_(col, col)));
            for (int r = col + 1; r < n; ++r) {
                double m = std::abs(std_part(lu_(r, col)));
                if (m > mag) { mag = m; best = r; }
            }
            if (mag < tol)
                throw SingularMatrixError("linear_solve: singular standard part");
            if (best != col)
                for (int j = 0; j < n; ++j) std::swap(lu_(col, j), lu_(best, j));
            piv_[col] = best;
            for (int r = col + 1; r < n; ++r) {
                R f = lu_(r, col) / lu_(col, col);
                lu_(r, col) = f;
                for (int j = col + 1; j < n; ++j) sub_assign_mul(lu_(r, j), f, lu_(col, j));
            }
        }
    }

    int size() const { return lu_.rows(); }

    void solve_inplace(std::span<R> b) const {
        const int n = lu_.rows();
        assert(static_cast<int>(b.size()) == n);
        for (int i = 0; i < n; ++i)
            if (piv_[i] != i) std::swap(b[i], b[piv_[i]]);
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) sub_assign_mul(b[i], lu_(i, j), b[j]);
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) sub_assign_mul(b[i], lu_(i, j), b[j]);
            b[i] = b[i] / lu_(i, i);
        }
    }

    std::vector<R> solve(std::span<const R> b) const {
        std::vector<R> x(b.begin(), b.end());
        solve_inplace(x);
        return x;
    }

  private:
    Mat<R> lu_;
    std::vector<int> piv_;
};

template <class R>
std::vector<R> linear_solve(const Mat<R>& a, std::span<const R> b) {
    return Lu<R>(a).solve(b);
}

template <class R>
Mat<R> mat_inverse(const Mat<R>& m) {
    const int n = m.rows();
    Lu<R> lu(m);
    Mat<R> inv(n, n);
    std::vector<R> col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = R(i == j ? 1.0 : 0.0);
        lu.solve_inplace(col);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace folq
