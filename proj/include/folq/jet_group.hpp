// SPDX-License-Identifier: MIT
#pragma once

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

#include "folq/errors.hpp"
#include "folq/linalg.hpp"

namespace folq {

/// Second-order frame package: the 2-jet of a chart-valued map at the origin,
/// z -> base + lin z + (1/2) quad(z, z).  quad is stored flat as
/// (i*n + k)*n + l, symmetric in (k, l) — the same layout Christoffel data
/// uses.
template <typename R = double>
struct Jet2Frame {
    std::vector<R> base;
    Mat<R> lin;
    std::vector<R> quad;
};

/// Element of the second-order jet group at the origin (base point fixed at
/// zero): an invertible linear part plus a symmetric quadratic part.
template <typename R = double>
struct G2Element {
    Mat<R> lin;
    std::vector<R> quad;
};

/// Isotropy element on the affine slice a = 1: the (n+1)x(n+1) matrix
/// [[A, 0], [alpha, 1]].  For adapted elements A is block-upper-triangular
/// for the (p, q) splitting and alpha is supported on transverse slots.
template <typename R = double>
struct HElement {
    Mat<R> a;
    std::vector<R> alpha;
};

/// Graded algebra element, realized as [[m0, v], [xi, 0]] in gl(n+1) modulo
/// multiples of the identity: v is grade -1, m0 grade 0 (block-upper for the
/// (p, q) splitting), xi grade +1 (transverse support).
template <typename R = double>
struct LieG {
    int p = 0;
    int q = 0;
    std::vector<R> v;
    Mat<R> m0;
    std::vector<R> xi;

    int n() const { return p + q; }
};

namespace detail {

/// B.S + T(A, A): the quadratic part of jet composition.  Shared between the
/// frame action and the group product, which follow the same formula.
template <typename R>
std::vector<R> compose_quad(const Mat<R>& blin, const std::vector<R>& bquad,
                            const Mat<R>& alin, const std::vector<R>& aquad) {
    const int n = blin.rows();
    std::vector<R> out(static_cast<std::size_t>(n) * n * n, R(0.0));
    std::vector<R> tmp(static_cast<std::size_t>(n) * n * n, R(0.0));  // T^i_{bc} A^c_l
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < n; ++b)
            for (int l = 0; l < n; ++l) {
                R acc(0.0);
                for (int c = 0; c < n; ++c)
                    add_assign_mul(acc, bquad[(i * n + b) * n + c], alin(c, l));
                tmp[(i * n + b) * n + l] = acc;
            }
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                R acc(0.0);
                for (int d = 0; d < n; ++d)
                    add_assign_mul(acc, blin(i, d), aquad[(d * n + k) * n + l]);
                for (int b = 0; b < n; ++b)
                    add_assign_mul(acc, tmp[(i * n + b) * n + l], alin(b, k));
                out[(i * n + k) * n + l] = acc;
            }
    return out;
}

}  // namespace detail

template <typename R = double>
G2Element<R> g2_identity(int n) {
    return {Mat<R>::identity(n), std::vector<R>(static_cast<std::size_t>(n) * n * n, R(0.0))};
}

/// Jet composition (g then h-first ordering: (g*h)(z) = g(h(z))).
template <typename R>
G2Element<R> g2_mul(const G2Element<R>& g, const G2Element<R>& h) {
    return {g.lin * h.lin, detail::compose_quad(g.lin, g.quad, h.lin, h.quad)};
}

template <typename R>
G2Element<R> g2_inverse(const G2Element<R>& g) {
    const int n = g.lin.rows();
    Mat<R> ainv = mat_inverse(g.lin);
    // (A, S)^{-1} = (A^{-1}, -A^{-1} S(A^{-1}, A^{-1}))
    std::vector<R> zero(static_cast<std::size_t>(n) * n * n, R(0.0));
    std::vector<R> sandwich = detail::compose_quad(Mat<R>::identity(n), g.quad, ainv, zero);
    std::vector<R> quad = detail::compose_quad(ainv, zero, Mat<R>::identity(n), sandwich);
    for (auto& c : quad) c = -c;
    return {std::move(ainv), std::move(quad)};
}

/// Right action of the jet group on second-order frames: jet composition
/// u.g = u after g, so act(act(u, g), h) = act(u, g2_mul(g, h)).
template <typename R>
Jet2Frame<R> act(const Jet2Frame<R>& u, const G2Element<R>& g) {
    return {u.base, u.lin * g.lin, detail::compose_quad(u.lin, u.quad, g.lin, g.quad)};
}

template <typename R = double>
HElement<R> h_identity(int n) {
    return {Mat<R>::identity(n), std::vector<R>(n, R(0.0))};
}

/// [[A,0],[a,1]] [[B,0],[b,1]] = [[AB, 0],[aB + b, 1]].
template <typename R>
HElement<R> h_mul(const HElement<R>& h, const HElement<R>& k) {
    const int n = h.a.rows();
    HElement<R> r{h.a * k.a, std::vector<R>(n, R(0.0))};
    for (int j = 0; j < n; ++j) {
        R acc = k.alpha[j];
        for (int i = 0; i < n; ++i) add_assign_mul(acc, h.alpha[i], k.a(i, j));
        r.alpha[j] = acc;
    }
    return r;
}

template <typename R>
HElement<R> h_inverse(const HElement<R>& h) {
    const int n = h.a.rows();
    HElement<R> r{mat_inverse(h.a), std::vector<R>(n, R(0.0))};
    for (int j = 0; j < n; ++j) {
        R acc(0.0);
        for (int i = 0; i < n; ++i) sub_assign_mul(acc, h.alpha[i], r.a(i, j));
        r.alpha[j] = acc;
    }
    return r;
}

template <typename R>
Mat<R> h_to_matrix(const HElement<R>& h) {
    const int n = h.a.rows();
    Mat<R> m(n + 1, n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = h.a(i, j);
    for (int j = 0; j < n; ++j) m(n, j) = h.alpha[j];
    m(n, n) = R(1.0);
    return m;
}

/// The natural inclusion of the isotropy group into the jet group: the 2-jet
/// at 0 of z -> Az / (1 + alpha z), whose quadratic part is
/// S^i_{kl} = -A^i_k alpha_l - A^i_l alpha_k.
template <typename R>
G2Element<R> include_H(const HElement<R>& h) {
    const int n = h.a.rows();
    G2Element<R> g{h.a, std::vector<R>(static_cast<std::size_t>(n) * n * n, R(0.0))};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                R acc(0.0);
                sub_assign_mul(acc, h.a(i, k), h.alpha[l]);
                sub_assign_mul(acc, h.a(i, l), h.alpha[k]);
                g.quad[(i * n + k) * n + l] = acc;
            }
    return g;
}

/// Projects an adapted isotropy element onto its purely transverse block: the
/// D block of A together with the transverse covector components.  A group
/// homomorphism because the lower-left block of adapted elements vanishes.
template <typename R>
HElement<R> project_group(const HElement<R>& h, int p) {
    const int n = h.a.rows();
    const int q = n - p;
    HElement<R> r{Mat<R>(q, q), std::vector<R>(q, R(0.0))};
    for (int i = 0; i < q; ++i)
        for (int k = 0; k < q; ++k) r.a(i, k) = h.a(p + i, p + k);
    for (int i = 0; i < q; ++i) r.alpha[i] = h.alpha[p + i];
    return r;
}

template <typename R = double>
LieG<R> lie_zero(int p, int q) {
    const int n = p + q;
    return {p, q, std::vector<R>(n, R(0.0)), Mat<R>(n, n), std::vector<R>(n, R(0.0))};
}

template <typename R>
Mat<R> lie_to_matrix(const LieG<R>& a) {
    const int n = a.n();
    Mat<R> m(n + 1, n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a.m0(i, j);
    for (int i = 0; i < n; ++i) m(i, n) = a.v[i];
    for (int j = 0; j < n; ++j) m(n, j) = a.xi[j];
    return m;
}

namespace detail {

constexpr double kAlgebraTol = 1e-9;

}  // namespace detail

/// Reads an (n+1)x(n+1) matrix back into the graded algebra.  The class of m
/// modulo identity multiples is normalized by subtracting the corner entry
/// from the diagonal; the result must then respect the splitting — grade 0 in
/// gl(n,q) (lower-left block zero) and grade 1 transverse — or the matrix
/// does not represent an algebra element and an AlgebraError is thrown.
template <typename R>
LieG<R> lie_from_matrix(int p, int q, const Mat<R>& m) {
    const int n = p + q;
    assert(m.rows() == n + 1 && m.cols() == n + 1);
    LieG<R> a = lie_zero<R>(p, q);
    const R corner = m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.m0(i, j) = i == j ? m(i, j) - corner : m(i, j);
    for (int i = 0; i < n; ++i) a.v[i] = m(i, n);
    for (int j = 0; j < n; ++j) a.xi[j] = m(n, j);

    for (int i = p; i < n; ++i)
        for (int j = 0; j < p; ++j)
            if (std::fabs(std_part(a.m0(i, j))) > detail::kAlgebraTol)
                throw AlgebraError(
                    "grade-0 part leaves gl(n,q): transverse-tangential entry [" +
                    std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] = " +
                    std::to_string(std_part(a.m0(i, j))));
    for (int j = 0; j < p; ++j)
        if (std::fabs(std_part(a.xi[j])) > detail::kAlgebraTol)
            throw AlgebraError("grade-1 part has tangential support at slot " +
                               std::to_string(j + 1));
    return a;
}

/// Matrix commutator in the (n+1)-realization, regraded.
template <typename R>
LieG<R> bracket(const LieG<R>& a, const LieG<R>& b) {
    const Mat<R> ma = lie_to_matrix(a);
    const Mat<R> mb = lie_to_matrix(b);
    return lie_from_matrix(a.p, a.q, ma * mb - mb * ma);
}

/// Adjoint action Ad(h) a = h a h^{-1} in the (n+1)-realization.
template <typename R>
LieG<R> adjoint(const HElement<R>& h, const LieG<R>& a) {
    const Mat<R> hm = h_to_matrix(h);
    const Mat<R> hi = h_to_matrix(h_inverse(h));
    return lie_from_matrix(a.p, a.q, hm * (lie_to_matrix(a) * hi));
}

/// exp(t [[0,0],[xi,0]]) — exact because the generator squares to zero.
template <typename R>
HElement<R> exp_H(const std::vector<R>& xi, double t) {
    const int n = static_cast<int>(xi.size());
    HElement<R> r = h_identity<R>(n);
    for (int j = 0; j < n; ++j) r.alpha[j] = t * xi[j];
    return r;
}

}  // namespace folq
