// SPDX-License-Identifier: MIT
//
// Symmetric tensors in monomial-coefficient storage.
//
// A symmetric contravariant k-tensor S is identified with its generating
// polynomial P_S(xi) = sum_gamma S^gamma xi^gamma on covectors xi, and a
// covariant tensor dually with a polynomial in vector coordinates.  Under
// this identification
//
//   sym_product  = polynomial multiplication (coefficient convolution),
//   contract     = the directional derivative  P -> sum_j eta_j dP/dxi_j,
//   pair(S, T)   = sum_gamma S^gamma T_gamma / multinomial(gamma),
//
// the last weight being what makes <v^k, eta^k> = <v,eta>^k come out.

#pragma once

#include <folq/linalg.hpp>
#include <folq/multi_index.hpp>

#include <cassert>
#include <span>
#include <vector>

namespace folq {

enum class Variance { Contra, Cov };

template <class R = double>
class SymTensor {
  public:
    SymTensor() = default;
    SymTensor(int dim, int degree, Variance var)
        : dim_(dim), degree_(degree), var_(var), c_(sym_dim(dim, degree)) {}

    static SymTensor basis(int dim, int i, Variance var) {
        SymTensor t(dim, 1, var);
        t.c_[i] = R(1.0);
        return t;
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    Variance variance() const { return var_; }
    int size() const { return static_cast<int>(c_.size()); }

    R& comp(int rank) { return c_[rank]; }
    const R& comp(int rank) const { return c_[rank]; }

    R& operator[](const MultiIndex& g) {
        assert(static_cast<int>(g.size()) == dim_ && mi_degree(g) == degree_);
        return c_[multi_index_rank(g)];
    }
    const R& operator[](const MultiIndex& g) const {
        assert(static_cast<int>(g.size()) == dim_ && mi_degree(g) == degree_);
        return c_[multi_index_rank(g)];
    }

  private:
    int dim_ = 0, degree_ = 0;
    Variance var_ = Variance::Contra;
    std::vector<R> c_;
};

/// Symmetric product: convolution of generating-polynomial coefficients.
template <class R>
SymTensor<R> sym_product(const SymTensor<R>& a, const SymTensor<R>& b) {
    assert(a.dim() == b.dim() && a.variance() == b.variance());
    const int dim = a.dim();
    SymTensor<R> r(dim, a.degree() + b.degree(), a.variance());
    const auto ga = multi_indices(dim, a.degree());
    const auto gb = multi_indices(dim, b.degree());
    MultiIndex sum(dim);
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            for (int d = 0; d < dim; ++d) sum[d] = ga[i][d] + gb[j][d];
            r[sum] += a.comp(i) * b.comp(j);
        }
    return r;
}

/// Insertion of a covector (for contravariant S): degree drops by one,
/// (i(eta)S)^gamma = sum_j eta_j (gamma_j + 1) S^{gamma + e_j}.
template <class R, class Scalar>
SymTensor<R> contract(std::span<const Scalar> eta, const SymTensor<R>& s) {
    assert(static_cast<int>(eta.size()) == s.dim() && s.degree() >= 1);
    const int dim = s.dim();
    SymTensor<R> r(dim, s.degree() - 1, s.variance());
    const auto gs = multi_indices(dim, s.degree());
    MultiIndex g(dim);
    for (int i = 0; i < s.size(); ++i) {
        for (int j = 0; j < dim; ++j) {
            if (gs[i][j] == 0) continue;
            g = gs[i];
            --g[j];
            r[g] += eta[j] * R(static_cast<double>(gs[i][j])) * s.comp(i);
        }
    }
    return r;
}

template <class R>
SymTensor<R> contract(const std::vector<double>& eta, const SymTensor<R>& s) {
    return contract(std::span<const double>(eta), s);
}

/// Full pairing of a contravariant with a covariant tensor of equal degree.
template <class R>
R pair(const SymTensor<R>& s, const SymTensor<R>& t) {
    assert(s.dim() == t.dim() && s.degree() == t.degree());
    assert(s.variance() != t.variance());
    const auto gs = multi_indices(s.dim(), s.degree());
    R acc{};
    for (int i = 0; i < s.size(); ++i)
        acc += s.comp(i) * t.comp(i) * R(1.0 / static_cast<double>(multinomial(gs[i])));
    return acc;
}

/// Restriction to the transverse factor: keep monomials with no support on
/// the first p (tangential) slots and reread them on the q-dimensional chart.
template <class R>
SymTensor<R> project_transverse(const SymTensor<R>& s, int p) {
    const int q = s.dim() - p;
    assert(q >= 0);
    SymTensor<R> r(q, s.degree(), s.variance());
    const auto gs = multi_indices(s.dim(), s.degree());
    MultiIndex g(q);
    for (int i = 0; i < s.size(); ++i) {
        bool tangential = false;
        for (int d = 0; d < p; ++d)
            if (gs[i][d] != 0) { tangential = true; break; }
        if (tangential) continue;
        for (int d = 0; d < q; ++d) g[d] = gs[i][p + d];
        r[g] = s.comp(i);
    }
    return r;
}

/// Coefficients of P_S(M xi), i.e. the substitution xi -> M xi in the
/// generating polynomial.  Callers pick M for the geometric action they need.
template <class R>
SymTensor<R> linear_substitute(const SymTensor<R>& s, const Mat<R>& m) {
    assert(m.rows() == s.dim() && m.cols() == s.dim());
    const int dim = s.dim();
    SymTensor<R> r(dim, s.degree(), s.variance());
    const auto gs = multi_indices(dim, s.degree());
    // Expand each monomial xi^gamma as a product of substituted linear forms.
    for (int i = 0; i < s.size(); ++i) {
        SymTensor<R> term(dim, 0, s.variance());
        term.comp(0) = s.comp(i);
        for (int j = 0; j < dim; ++j)
            for (int rep = 0; rep < gs[i][j]; ++rep) {
                SymTensor<R> lin(dim, 1, s.variance());
                for (int d = 0; d < dim; ++d) lin.comp(d) = m(j, d);
                term = sym_product(term, lin);
            }
        for (int rnk = 0; rnk < r.size(); ++rnk) r.comp(rnk) += term.comp(rnk);
    }
    return r;
}

/// GL action on contravariant tensors, rho(A)(v1 v ... v vk) = Av1 v ... v Avk.
/// On generating polynomials this is P -> P(A^T xi).
template <class R>
SymTensor<R> rho_action(const SymTensor<R>& s, const Mat<R>& a) {
    Mat<R> at(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) at(j, i) = a(i, j);
    return linear_substitute(s, at);
}

}  // namespace folq
