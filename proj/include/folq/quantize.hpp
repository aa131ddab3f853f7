// SPDX-License-Identifier: MIT
//
// Quantization on foliated charts: symbols and functions lift to the adapted
// frame bundle, iterated coframe derivatives and transverse divergences are
// combined with fixed rational weights, and the value at the canonical frame
// of the connection is the quantized operator applied to the function.
//
// Conventions (all mutually pinned by the invariance telescoping):
//   - symmetric tensors are stored through monomial coefficients of their
//     generating polynomial (see sym_tensor.hpp);
//   - the pairing is the full index contraction, pair() there;
//   - the divergence inserts a covector slot, i(eta) = contract(eta, .) /
//     degree, so that <i(eta) T, U> = <T, eta v U> holds with no factor.

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "folq/cartan.hpp"

namespace folq {

/// Tensor-valued function of the bundle coordinates.  `dim` and `degree`
/// describe the value space S^degree of an n = dim dimensional slot space.
struct EquivariantField {
    int dim = 0;
    int degree = 0;
    Variance variance = Variance::Contra;
    std::function<SymTensor<Jet>(std::span<const Jet>)> eval;
};

namespace detail {

inline long long binom(int k, int l) {
    long long r = 1;
    for (int i = 1; i <= l; ++i) r = r * (k - l + i) / i;
    return r;
}

}  // namespace detail

/// Weight of the l-fold divergence term in the degree-k formula on a
/// codimension-q chart:
///   C_{k,0} = 1,
///   C_{k,l} = [(k-1)...(k-l)] / [(q+2k-1)...(q+2k-l)] * binom(k, l).
/// Exact integer arithmetic; the value vanishes for l = k >= 1.
inline double coeff(int k, int l, int q) {
    if (k < 0 || l < 0 || l > k) throw EvalError("coefficient index out of range");
    long long num = detail::binom(k, l);
    long long den = 1;
    for (int i = 1; i <= l; ++i) {
        num *= k - i;
        den *= q + 2 * k - i;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

/// Covector slot insertion, i(eta) = contract(eta, .) / degree.  This is the
/// normalization under which the pairing adjoint of insertion is the plain
/// symmetric product.
template <class R>
SymTensor<R> slot_insert(std::span<const double> eta, const SymTensor<R>& s) {
    if (s.degree() < 1) throw EvalError("slot insertion requires degree >= 1");
    SymTensor<R> c = contract(eta, s);
    for (int r = 0; r < c.size(); ++r) c.comp(r) *= 1.0 / s.degree();
    return c;
}

template <class R>
SymTensor<R> slot_insert(const std::vector<double>& eta, const SymTensor<R>& s) {
    return slot_insert(std::span<const double>(eta), s);
}

/// Pullback of a chart function to the bundle: constant along fibers.
inline EquivariantField lift_function(const ScalarField& f, const AdaptedCartan& cc) {
    const int n = cc.layout.n();
    auto base = std::make_shared<const ScalarField>(f);
    EquivariantField out{n, 0, Variance::Contra, {}};
    out.eval = [base, n](std::span<const Jet> u) {
        SymTensor<Jet> t(n, 0, Variance::Contra);
        t.comp(0) = (*base)(u.first(n));
        return t;
    };
    return out;
}

/// Lift of a symbol: the base value read in the moving frame,
/// S-hat(m, h) = rho(A_h^{-1}) S(m).  Independent of the covector part of the
/// frame, equivariant under right multiplication.
inline EquivariantField lift_symbol(const SymbolField& s, const AdaptedCartan& cc) {
    const FoliatedChart& c = cc.conn.chart();
    if (s.chart.p != c.p || s.chart.q != c.q)
        throw EvalError("symbol chart does not match the connection chart");
    const FiberLayout layout = cc.layout;
    auto base = std::make_shared<const SymbolField>(s);
    EquivariantField out{layout.n(), s.degree, Variance::Contra, {}};
    out.eval = [base, layout](std::span<const Jet> u) {
        const auto h = to_h(layout, u);
        return rho_action(base->eval(u.first(layout.n())), mat_inverse(h.a));
    };
    return out;
}

/// Coordinate velocity of the fiber motion u . exp(t k) for an isotropy
/// algebra element k (no translation part): the matrix product h k read back
/// into the pattern and covector slots.
inline std::vector<Jet> vertical_direction(const FiberLayout& layout,
                                           std::span<const Jet> u, const LieG<double>& k) {
    const int n = layout.n();
    for (int i = 0; i < n; ++i)
        if (k.v[i] != 0.0)
            throw EvalError("vertical direction requires a fiber algebra element");
    const Mat<Jet> hm = h_to_matrix(to_h(layout, u));
    const Mat<double> km = lie_to_matrix(k);
    std::vector<Jet> out(layout.gdim(), Jet(0.0));
    for (int s = 0; s < layout.pdim(); ++s) {
        const auto [i, j] = layout.pattern[s];
        Jet acc(0.0);
        for (int d = 0; d <= n; ++d) add_assign_mul(acc, hm(i, d), Jet(km(d, j)));
        out[n + s] = acc;
    }
    for (int j = layout.p; j < n; ++j) {
        Jet acc(0.0);
        for (int d = 0; d <= n; ++d) add_assign_mul(acc, hm(n, d), Jet(km(d, j)));
        out[n + layout.pdim() + (j - layout.p)] = acc;
    }
    return out;
}

/// Derivative of a bundle field along the fiber motion of an isotropy
/// algebra element.
inline SymTensor<Jet> vertical_lie(const EquivariantField& F, const FiberLayout& layout,
                                   std::span<const Jet> u, const LieG<double>& k) {
    const int slot = fresh_slot(u);
    const auto lifted = lift_point(u, vertical_direction(layout, u, k), slot);
    const auto t = F.eval(lifted);
    SymTensor<Jet> out(F.dim, F.degree, F.variance);
    for (int r = 0; r < t.size(); ++r) out.comp(r) = t.comp(r).eps_coeff(slot);
    return out;
}

/// The same derivative as a field, for nesting under further operators.
inline EquivariantField vertical_lie_field(const EquivariantField& F,
                                           const FiberLayout& layout,
                                           const LieG<double>& k) {
    EquivariantField out{F.dim, F.degree, F.variance, {}};
    out.eval = [F, layout, k](std::span<const Jet> u) {
        return vertical_lie(F, layout, u, k);
    };
    return out;
}

/// Derivative of the slot action: d/dt rho(exp(t m0)) S at t = 0, computed by
/// applying the action over the jet ring to I + eps m0.
inline SymTensor<Jet> rho_star(const SymTensor<Jet>& s, const Mat<double>& m0) {
    int slot = 0;
    for (int r = 0; r < s.size(); ++r) slot = std::max(slot, s.comp(r).width());
    const int n = m0.rows();
    Mat<Jet> a = Mat<Jet>::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet t = Jet::seeded(0.0, slot);
            t *= m0(i, j);
            a(i, j) += t;
        }
    const auto moved = rho_action(s, a);
    SymTensor<Jet> out(s.dim(), s.degree(), s.variance());
    for (int r = 0; r < out.size(); ++r) out.comp(r) = moved.comp(r).eps_coeff(slot);
    return out;
}

namespace detail {

/// Monomial coefficients of the k-fold symmetrized coframe derivative of a
/// scalar bundle field: the degree-k part of X -> (L_{omega^{-1}(X)})^k F(u).
/// The clean recursion on monomial coefficients is
///   T_k^gamma = sum_j (L_j T_{k-1})^{gamma - e_j},
/// polarization making the outer symmetrization exact.
inline std::vector<Jet> nabla_rec(const EquivariantField& F, const AdaptedCartan& cc,
                                  std::span<const Jet> u, int k) {
    if (k == 0) return {F.eval(u).comp(0)};
    const int n = cc.layout.n();
    const auto fr = omega_frame(cc, u);
    const int slot = fresh_slot(u);
    const auto lo = multi_indices(n, k - 1);
    std::vector<Jet> out(sym_dim(n, k), Jet(0.0));
    std::vector<Jet> unit(cc.layout.gdim(), Jet(0.0));
    for (int j = 0; j < n; ++j) {
        unit[j] = Jet(1.0);
        const auto vj = omega_solve(fr, unit);
        unit[j] = Jet(0.0);
        const auto lifted = lift_point(u, vj, slot);
        const auto inner = nabla_rec(F, cc, lifted, k - 1);
        for (std::size_t r = 0; r < lo.size(); ++r) {
            MultiIndex g = lo[r];
            ++g[j];
            out[multi_index_rank(g)] += inner[r].eps_coeff(slot);
        }
    }
    return out;
}

/// Monomial coefficients of the l-fold transverse divergence of a
/// contravariant field: each step differentiates along the coframe directions
/// e_j (j transverse) and inserts the dual covector slot.
inline std::vector<Jet> div_rec(const EquivariantField& F, const AdaptedCartan& cc,
                                std::span<const Jet> u, int l) {
    if (l == 0) {
        const auto t = F.eval(u);
        std::vector<Jet> out(t.size());
        for (int r = 0; r < t.size(); ++r) out[r] = t.comp(r);
        return out;
    }
    const int n = cc.layout.n();
    const int p = cc.layout.p;
    const int d = F.degree - l + 1;  // degree entering the outermost divergence
    const auto fr = omega_frame(cc, u);
    const int slot = fresh_slot(u);
    const auto lo = multi_indices(n, d - 1);
    std::vector<Jet> out(lo.size(), Jet(0.0));
    std::vector<Jet> unit(cc.layout.gdim(), Jet(0.0));
    for (int j = p; j < n; ++j) {
        unit[j] = Jet(1.0);
        const auto vj = omega_solve(fr, unit);
        unit[j] = Jet(0.0);
        const auto lifted = lift_point(u, vj, slot);
        const auto inner = div_rec(F, cc, lifted, l - 1);
        for (std::size_t r = 0; r < lo.size(); ++r) {
            MultiIndex g = lo[r];
            ++g[j];
            Jet t = inner[multi_index_rank(g)].eps_coeff(slot);
            t *= static_cast<double>(lo[r][j] + 1) / d;
            out[r] += t;
        }
    }
    return out;
}

}  // namespace detail

/// k-fold symmetrized coframe derivative of a scalar-valued field; covariant
/// degree-k values.
inline SymTensor<Jet> invariant_derivative(const EquivariantField& F,
                                           const AdaptedCartan& cc,
                                           std::span<const Jet> u, int k) {
    if (F.degree != 0)
        throw EvalError(
            "iterated invariant derivative expects a scalar-valued field; use "
            "directional_derivative for tensor values");
    if (k < 0) throw EvalError("derivative order must be non-negative");
    const auto comps = detail::nabla_rec(F, cc, u, k);
    SymTensor<Jet> t(cc.layout.n(), k, Variance::Cov);
    for (int r = 0; r < t.size(); ++r) t.comp(r) = comps[r];
    return t;
}

/// First coframe derivative of an arbitrary tensor-valued field: entry j is
/// the derivative along the coframe direction e_j.
inline std::vector<SymTensor<Jet>> directional_derivative(const EquivariantField& F,
                                                          const AdaptedCartan& cc,
                                                          std::span<const Jet> u) {
    const int n = cc.layout.n();
    const auto fr = omega_frame(cc, u);
    const int slot = fresh_slot(u);
    std::vector<SymTensor<Jet>> out;
    out.reserve(n);
    std::vector<Jet> unit(cc.layout.gdim(), Jet(0.0));
    for (int j = 0; j < n; ++j) {
        unit[j] = Jet(1.0);
        const auto vj = omega_solve(fr, unit);
        unit[j] = Jet(0.0);
        const auto t = F.eval(lift_point(u, vj, slot));
        SymTensor<Jet> d(F.dim, F.degree, F.variance);
        for (int r = 0; r < t.size(); ++r) d.comp(r) = t.comp(r).eps_coeff(slot);
        out.push_back(std::move(d));
    }
    return out;
}

/// l-fold transverse divergence of a contravariant field.
inline SymTensor<Jet> divergence(const EquivariantField& F, const AdaptedCartan& cc,
                                 std::span<const Jet> u, int l) {
    if (F.variance != Variance::Contra)
        throw EvalError("divergence expects contravariant values");
    if (F.dim != cc.layout.n())
        throw EvalError("field value dimension does not match the chart");
    if (l < 0 || l > F.degree)
        throw EvalError("divergence order out of range for the field degree");
    const auto comps = detail::div_rec(F, cc, u, l);
    SymTensor<Jet> t(F.dim, F.degree - l, Variance::Contra);
    for (int r = 0; r < t.size(); ++r) t.comp(r) = comps[r];
    return t;
}

/// Field combinators, for nesting derivatives under vertical flows.
inline EquivariantField derivative_field(const EquivariantField& F,
                                         const AdaptedCartan& cc, int k) {
    if (F.degree != 0) throw EvalError("derivative_field expects a scalar-valued field");
    auto base = std::make_shared<const AdaptedCartan>(cc);
    auto inner = std::make_shared<const EquivariantField>(F);
    EquivariantField out{cc.layout.n(), k, Variance::Cov, {}};
    out.eval = [base, inner, k](std::span<const Jet> u) {
        return invariant_derivative(*inner, *base, u, k);
    };
    return out;
}

inline EquivariantField divergence_field(const EquivariantField& F,
                                         const AdaptedCartan& cc, int l) {
    if (l < 0 || l > F.degree)
        throw EvalError("divergence order out of range for the field degree");
    auto base = std::make_shared<const AdaptedCartan>(cc);
    auto inner = std::make_shared<const EquivariantField>(F);
    EquivariantField out{F.dim, F.degree - l, F.variance, {}};
    out.eval = [base, inner, l](std::span<const Jet> u) {
        return divergence(*inner, *base, u, l);
    };
    return out;
}

/// The quantization pairing evaluated at an arbitrary bundle point:
///   sum_l C_{k,l} < Div^l S-hat, D^{k-l} f-hat > (u).
/// At u = canonical frame this is the quantized operator; for leaf-constant
/// functions the value is constant along fibers.
inline Jet quantize_at(const AdaptedCartan& cc, const SymbolField& s, const ScalarField& f,
                       std::span<const Jet> u) {
    const int k = s.degree;
    const int q = cc.layout.q;
    const auto sh = lift_symbol(s, cc);
    const auto fh = lift_function(f, cc);
    Jet acc(0.0);
    for (int l = 0; l <= k; ++l) {
        const double c = coeff(k, l, q);
        if (c == 0.0) continue;
        Jet term = pair(divergence(sh, cc, u, l), invariant_derivative(fh, cc, u, k - l));
        term *= c;
        acc += term;
    }
    return acc;
}

/// Quantization of an adapted symbol against a function, evaluated at the
/// canonical frame of the normalized coframe over m.
inline double quantize_adapted(const AdaptedConnection& conn, const SymbolField& s,
                               const ScalarField& f, std::span<const double> m) {
    if (static_cast<int>(m.size()) != conn.n())
        throw EvalError("base point dimension does not match the chart");
    const auto cc = make_normal_cartan(conn);
    return quantize_at(cc, s, f, make_jet_point(canonical_point(cc.layout, m))).std();
}

inline double quantize_adapted(const AdaptedConnection& conn, const SymbolField& s,
                               const ScalarField& f, const std::vector<double>& m) {
    return quantize_adapted(conn, s, f, std::span<const double>(m));
}

/// Transverse quantization: the same construction on a chart with p = 0.
inline double quantize_foliated(const FoliatedConnection& conn, const SymbolField& s,
                                const ScalarField& f, std::span<const double> y) {
    if (conn.chart().p != 0)
        throw EvalError("transverse quantization requires a chart with p = 0");
    return quantize_adapted(conn, s, f, y);
}

inline double quantize_foliated(const FoliatedConnection& conn, const SymbolField& s,
                                const ScalarField& f, const std::vector<double>& y) {
    return quantize_foliated(conn, s, f, std::span<const double>(y));
}

/// Reads a foliated symbol as a symbol on the transverse chart: tangential
/// monomials are dropped, transverse ones are evaluated with x frozen at the
/// box center (they are leaf-constant for foliated input).
inline SymbolField reduce_symbol(const SymbolField& s) {
    const FoliatedChart c = s.chart;
    if (c.p == 0) return s;
    const int p = c.p, q = c.q, n = c.n();
    SymbolField out;
    out.chart = c.transverse_chart();
    out.degree = s.degree;
    out.comp.resize(sym_dim(q, s.degree));
    auto base = std::make_shared<const SymbolField>(s);
    const auto xc = c.center();
    out.dense = [base, p, q, n, xc](std::span<const Jet> ypt) {
        std::vector<Jet> full(n);
        for (int i = 0; i < p; ++i) full[i] = Jet(xc[i]);
        for (int i = 0; i < q; ++i) full[p + i] = ypt[i];
        const auto pv = project_transverse(base->eval(full), p);
        std::vector<Jet> flat(pv.size());
        for (int r = 0; r < pv.size(); ++r) flat[r] = pv.comp(r);
        return flat;
    };
    auto dense = out.dense;
    for (int r = 0; r < static_cast<int>(out.comp.size()); ++r)
        out.comp[r] = ScalarField(ScalarField::Fn(
            [dense, r](std::span<const Jet> pt) { return dense(pt)[r]; }));
    return out;
}

/// Coefficient table of a linear operator f -> Q(f):
///   Q(f) = sum_d sum_gamma by_degree[d][rank(gamma)] (d^gamma f)(base).
struct OperatorTable {
    std::vector<double> base;
    int dim = 0;
    int degree = 0;
    std::vector<std::vector<double>> by_degree;  // multi_indices(dim, d) order
};

/// Recovers the coefficient table of a quantizer by probing with the
/// polynomials (z - m)^gamma / gamma!, whose d^delta at m is 1 exactly when
/// delta = gamma.  The map must be linear; a two-function check guards this.
inline OperatorTable extract_operator(
    const std::function<double(const ScalarField&)>& quantizer, const FoliatedChart& chart,
    std::span<const double> m, int degree) {
    const int n = chart.n();
    if (static_cast<int>(m.size()) != n)
        throw EvalError("expansion point dimension does not match the chart");
    if (degree < 0) throw EvalError("operator degree must be non-negative");
    const std::vector<double> mv(m.begin(), m.end());

    const ScalarField fa(ScalarField::Fn([mv, n](std::span<const Jet> z) {
        Jet acc(0.0);
        for (int i = 0; i < n; ++i) {
            const Jet d = z[i] - Jet(mv[i]);
            acc += d * d;
            Jet lin = d;
            lin *= i + 1.0;
            acc += lin;
        }
        return acc;
    }));
    const ScalarField fb(ScalarField::Fn([mv, n](std::span<const Jet> z) {
        Jet acc(1.0);
        for (int i = 0; i < n; ++i) acc += z[i] - Jet(mv[i]);
        acc += (z[0] - Jet(mv[0])) * (z[n - 1] - Jet(mv[n - 1]));
        return acc;
    }));
    const double qa = quantizer(fa);
    const double qb = quantizer(fb);
    const ScalarField combo(ScalarField::Fn([fa, fb](std::span<const Jet> z) {
        Jet va = fa(z);
        va *= 0.7;
        Jet vb = fb(z);
        vb *= -1.3;
        return va + vb;
    }));
    if (std::fabs(quantizer(combo) - (0.7 * qa - 1.3 * qb)) >
        1e-8 * (1.0 + std::fabs(qa) + std::fabs(qb)))
        throw EvalError("operator extraction requires a linear quantizer");

    OperatorTable t;
    t.base = mv;
    t.dim = n;
    t.degree = degree;
    t.by_degree.resize(degree + 1);
    for (int d = 0; d <= degree; ++d) {
        const auto gs = multi_indices(n, d);
        t.by_degree[d].resize(gs.size());
        for (std::size_t r = 0; r < gs.size(); ++r) {
            const MultiIndex g = gs[r];
            double fact = 1.0;
            for (int e : g)
                for (int i = 2; i <= e; ++i) fact *= i;
            const double scale = 1.0 / fact;
            const ScalarField probe(ScalarField::Fn(
                [mv, g, scale, n](std::span<const Jet> z) {
                    Jet acc(scale);
                    for (int i = 0; i < n; ++i)
                        if (g[i] > 0) acc = acc * pow(z[i] - Jet(mv[i]), g[i]);
                    return acc;
                }));
            t.by_degree[d][r] = quantizer(probe);
        }
    }
    return t;
}

}  // namespace folq
