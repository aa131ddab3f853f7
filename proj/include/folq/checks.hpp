// SPDX-License-Identifier: MIT
//
// Named, seeded property suites over randomly generated charts, connections,
// symbols, and functions.  Each suite verifies one construction law of the
// library numerically and reports its worst residual together with the
// instance that produced it.  Suites are deterministic functions of their
// spec, so failures reproduce exactly.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "folq/quantize.hpp"

namespace folq {

/// Parameters of one suite run.  `k` bounds the symbol degree / derivative
/// order the suite exercises; `connections` and `points` size the sample.
struct CheckSpec {
    std::string name;
    int p = 1;
    int q = 2;
    int k = 2;
    int connections = 2;
    int points = 3;
    std::uint64_t seed = 20260814;
    double tolerance = 1e-8;
};

struct CheckReport {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string worst_case;
};

namespace detail {

struct Worst {
    double value = 0.0;
    std::string where;
    void feed(double r, const std::string& w) {
        if (where.empty() || r > value) {
            value = std::max(value, r);
            where = w;
        }
    }
};

inline FoliatedChart box_chart(int p, int q) {
    const int n = p + q;
    return FoliatedChart{p, q,
                         Box{std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)}};
}

inline std::string describe(const CheckSpec& spec, int conn, std::span<const double> m,
                            const std::string& extra = "") {
    std::ostringstream os;
    os << "p=" << spec.p << " q=" << spec.q << " conn=" << conn << " m=(";
    for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
    os << ")";
    if (!extra.empty()) os << " " << extra;
    return os.str();
}

inline Mat<Jet> jet_mat(const Mat<double>& a) {
    Mat<Jet> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = Jet(a(i, j));
    return out;
}

inline double tensor_gap(const SymTensor<Jet>& a, const SymTensor<Jet>& b) {
    double w = 0.0, scale = 0.0;
    for (int r = 0; r < b.size(); ++r) scale = std::max(scale, std::fabs(b.comp(r).std()));
    for (int r = 0; r < a.size(); ++r)
        w = std::max(w, std::fabs(a.comp(r).std() - b.comp(r).std()));
    return w / (1.0 + scale);
}

inline SymbolField generic_symbol(const FoliatedChart& c, int degree, Rng& rng) {
    SymbolField s;
    s.chart = c;
    s.degree = degree;
    std::vector<int> slots(c.n());
    for (int i = 0; i < c.n(); ++i) slots[i] = i;
    for (int r = 0; r < sym_dim(c.n(), degree); ++r)
        s.comp.push_back(random_poly_field(rng, slots, 2, 1.0));
    return s;
}

inline HElement<double> random_linear_frame(Rng& rng, int p, int q) {
    HElement<double> g = random_adapted_h(rng, p, q);
    std::fill(g.alpha.begin(), g.alpha.end(), 0.0);
    return g;
}

inline LieG<double> random_grade0(Rng& rng, int p, int q) {
    LieG<double> a = lie_zero<double>(p, q);
    const int n = p + q;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(i >= p && j < p)) a.m0(i, j) = rng.uniform(-0.6, 0.6);
    return a;
}

inline LieG<double> random_grade1(Rng& rng, int p, int q) {
    LieG<double> a = lie_zero<double>(p, q);
    for (int j = p; j < p + q; ++j) a.xi[j] = rng.uniform(-0.8, 0.8);
    return a;
}

/// Curvature coefficient K^i_{jkl} of the grade-0 block at one bundle point,
/// read from the flat curvature array; structurally absent entries are zero.
struct CurvatureView {
    const std::vector<Jet>& kappa;
    const FiberLayout& layout;
    double block(int i, int j, int k, int l) const {
        const int n = layout.n();
        const int s = layout.pattern_slot[i * n + j];
        return s < 0 ? 0.0 : kappa[(k * n + l) * layout.gdim() + n + s].std();
    }
};

// ---------------------------------------------------------------------------
// Cartan construction suites.

/// The translation part of the structure equation: on any pair of coordinate
/// directions, d(omega_-1) + omega_0 wedge omega_-1 vanishes.
inline void suite_structure_equation(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const int gd = cc.layout.gdim();
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            for (int fi = 0; fi < 2; ++fi) {
                const auto u = fi == 0
                                   ? make_jet_point(canonical_point(cc.layout, m))
                                   : make_jet_point(bundle_coords(
                                         cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
                const Mat<Jet> w0 = omega_frame(cc, u).m;
                for (int pairi = 0; pairi < 3; ++pairi) {
                    const int a = rng.uniform_int(0, gd - 1);
                    int b = rng.uniform_int(0, gd - 1);
                    if (b == a) b = (b + 1) % gd;
                    std::vector<Jet> dir(gd, Jet(0.0));
                    dir[a] = Jet(1.0);
                    const Mat<Jet> wa = omega_frame(cc, lift_point(u, dir, 0)).m;
                    dir[a] = Jet(0.0);
                    dir[b] = Jet(1.0);
                    const Mat<Jet> wb = omega_frame(cc, lift_point(u, dir, 0)).m;
                    for (int i = 0; i < n; ++i) {
                        double r = wa(i, b).eps_coeff(0).std() - wb(i, a).eps_coeff(0).std();
                        for (int k = 0; k < n; ++k) {
                            const int s = cc.layout.pattern_slot[i * n + k];
                            if (s < 0) continue;
                            r += w0(n + s, a).std() * w0(k, b).std() -
                                 w0(n + s, b).std() * w0(k, a).std();
                        }
                        worst.feed(std::fabs(r),
                                   describe(spec, ci, m,
                                            fi == 0 ? "canonical frame" : "random frame"));
                    }
                }
            }
        }
    }
}

/// First Bianchi identity: the cyclic sum of the grade-0 curvature over its
/// three lower slots vanishes.
inline void suite_bianchi(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(canonical_point(cc.layout, m));
            const auto kappa = curvature_components(cc, u);
            const CurvatureView kv{kappa, cc.layout};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            const double r = kv.block(i, j, k, l) + kv.block(i, k, l, j) +
                                             kv.block(i, l, j, k);
                            worst.feed(std::fabs(r), describe(spec, ci, m));
                        }
        }
    }
}

/// Torsion-freeness and the two transverse trace conditions of the curvature.
inline void suite_normality(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const int gd = cc.layout.gdim();
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(canonical_point(cc.layout, m));
            const auto kappa = curvature_components(cc, u);
            const CurvatureView kv{kappa, cc.layout};
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int i = 0; i < n; ++i)
                        worst.feed(std::fabs(kappa[(k * n + l) * gd + i].std()),
                                   describe(spec, ci, m, "torsion"));
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    double t1 = 0.0, t2 = 0.0;
                    for (int i = spec.p; i < n; ++i) {
                        t1 += kv.block(i, j, i, l);
                        t2 += kv.block(i, i, j, l);
                    }
                    worst.feed(std::fabs(t1), describe(spec, ci, m, "trace K^i_{jil}"));
                    worst.feed(std::fabs(t2), describe(spec, ci, m, "trace K^i_{ijl}"));
                }
        }
    }
}

/// Linear response of the normality trace to a deformation perturbation:
/// adding t*A to the covector rows changes the trace, to first order in t, by
/// t[(q-1)A_{jl} + A_{jl} - A_{lj}].  The curvature is a cubic polynomial in
/// t (the frame correction is linear in t and enters bilinearly), so a
/// four-point stencil recovers the derivative at t=0 exactly.
inline void suite_equ2_linear_response(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n(), p = spec.p;
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        auto normal = std::make_shared<const AdaptedCartan>(make_normal_cartan(conn));
        Mat<double> A(n, n);
        for (int j = p; j < n; ++j)
            for (int l = 0; l < n; ++l) A(j, l) = rng.uniform(-0.5, 0.5);
        auto perturbed = [&](double t) {
            return make_custom_cartan(
                conn, [normal, A, n, t](std::span<const Jet> pt) {
                    auto rows = deformation_tensor(*normal, pt);
                    for (int j = 0; j < n; ++j)
                        for (int l = 0; l < n; ++l) rows[j * n + l] += Jet(t * A(j, l));
                    return rows;
                });
        };
        const AdaptedCartan ccs[4] = {perturbed(1.0), perturbed(-1.0), perturbed(2.0),
                                      perturbed(-2.0)};
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            Mat<double> tr[4] = {Mat<double>(n, n), Mat<double>(n, n), Mat<double>(n, n),
                                 Mat<double>(n, n)};
            for (int t = 0; t < 4; ++t) {
                const auto u = make_jet_point(canonical_point(ccs[t].layout, m));
                const auto kappa = curvature_components(ccs[t], u);
                const CurvatureView kv{kappa, ccs[t].layout};
                for (int j = p; j < n; ++j)
                    for (int l = 0; l < n; ++l)
                        for (int i = p; i < n; ++i) tr[t](j, l) += kv.block(i, j, i, l);
            }
            // The trace identity lives on the transverse block: for a
            // tangential form index the delta term -d^i_l A_{ji} cannot fire
            // inside a transverse trace and the response is (q+1)A_{jl}.
            for (int j = p; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const double resp = (8.0 * (tr[0](j, l) - tr[1](j, l)) -
                                         (tr[2](j, l) - tr[3](j, l))) /
                                        12.0;
                    const double expect =
                        l < p ? (spec.q + 1) * A(j, l)
                              : (spec.q - 1) * A(j, l) + A(j, l) - A(l, j);
                    worst.feed(std::fabs(resp - expect) / (1.0 + std::fabs(expect)),
                               describe(spec, ci, m));
                }
        }
    }
}

/// The transverse projection of the adapted coframe matches the coframe of
/// the induced transverse connection.
inline void suite_link(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto tc = make_normal_cartan(induce_foliated(conn));
        const auto rep =
            check_link(cc, tc, std::max(10, spec.points * 5), spec.seed + 31 * ci);
        worst.feed(rep.worst, describe(spec, ci, c.center(), "random frames"));
    }
}

// ---------------------------------------------------------------------------
// Equivariance identity suites.

/// Finite frame changes with no covector part substitute through the
/// derivative slots; tensor values pick up the inverse slot action.
inline void suite_gonabla(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        std::vector<int> slots(n);
        for (int i = 0; i < n; ++i) slots[i] = i;
        const ScalarField f = random_poly_field(rng, slots, 3, 1.0);
        const auto fh = lift_function(f, cc);
        const auto S = generic_symbol(c, 2, rng);
        const auto sh = lift_symbol(S, cc);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto h0 = random_adapted_h(rng, spec.p, spec.q);
            const auto g = random_linear_frame(rng, spec.p, spec.q);
            const auto u = make_jet_point(bundle_coords(cc.layout, m, h0));
            const auto ug = make_jet_point(bundle_coords(cc.layout, m, h_mul(h0, g)));
            const Mat<Jet> ag = jet_mat(g.a);
            for (int k = 1; k <= std::min(3, spec.k); ++k) {
                const auto t0 = invariant_derivative(fh, cc, u, k);
                const auto tg = invariant_derivative(fh, cc, ug, k);
                std::ostringstream ex;
                ex << "scalar order k=" << k;
                worst.feed(tensor_gap(tg, linear_substitute(t0, ag)),
                           describe(spec, ci, m, ex.str()));
            }
            const auto d0 = directional_derivative(sh, cc, u);
            const auto dg = directional_derivative(sh, cc, ug);
            const Mat<Jet> agi = jet_mat(mat_inverse(g.a));
            for (int j = 0; j < n; ++j) {
                SymTensor<Jet> mix(n, 2, Variance::Contra);
                for (int r = 0; r < mix.size(); ++r) {
                    Jet acc(0.0);
                    for (int a = 0; a < n; ++a)
                        add_assign_mul(acc, Jet(g.a(a, j)), d0[a].comp(r));
                    mix.comp(r) = acc;
                }
                worst.feed(tensor_gap(dg[j], rho_action(mix, agi)),
                           describe(spec, ci, m, "tensor-valued first derivative"));
            }
        }
    }
}

/// The transverse projection of iterated divergences of an adapted-class
/// symbol transforms by the transverse block of the frame change.
inline void suite_goinv(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(2, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto sh = lift_symbol(S, cc);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto h0 = random_adapted_h(rng, spec.p, spec.q);
            const auto g = random_linear_frame(rng, spec.p, spec.q);
            const auto u = make_jet_point(bundle_coords(cc.layout, m, h0));
            const auto ug = make_jet_point(bundle_coords(cc.layout, m, h_mul(h0, g)));
            const Mat<Jet> dqi = jet_mat(mat_inverse(project_group(g, spec.p).a));
            for (int l = 1; l <= std::min(2, k); ++l) {
                const auto dv0 = divergence(sh, cc, u, l);
                const auto dvg = divergence(sh, cc, ug, l);
                std::ostringstream ex;
                ex << "l=" << l;
                worst.feed(
                    tensor_gap(project_transverse(dvg, spec.p),
                               rho_action(project_transverse(dv0, spec.p), dqi)),
                    describe(spec, ci, m, ex.str()));
            }
        }
    }
}

/// Covector-direction response of one divergence: the projected commutator
/// with the vertical flow is (q+2k-1) times the covector insertion.
inline void suite_div1(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = generic_symbol(c, k, rng);
        const auto sh = lift_symbol(S, cc);
        auto shf = std::make_shared<const EquivariantField>(sh);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            const auto xi = random_grade1(rng, spec.p, spec.q);
            std::vector<double> hv(xi.xi.begin(), xi.xi.end());
            const auto lhs_a = vertical_lie(divergence_field(*shf, cc, 1), cc.layout, u, xi);
            const auto lhs_b =
                divergence(vertical_lie_field(*shf, cc.layout, xi), cc, u, 1);
            SymTensor<Jet> lhs(lhs_a.dim(), lhs_a.degree(), lhs_a.variance());
            for (int r = 0; r < lhs.size(); ++r) lhs.comp(r) = lhs_a.comp(r) - lhs_b.comp(r);
            auto rhs = slot_insert(hv, sh.eval(u));
            for (int r = 0; r < rhs.size(); ++r) rhs.comp(r) *= spec.q + 2.0 * k - 1.0;
            worst.feed(tensor_gap(project_transverse(lhs, spec.p),
                                  project_transverse(rhs, spec.p)),
                       describe(spec, ci, m));
        }
    }
}

/// Iterated version: the projected commutator of the vertical flow with l
/// divergences is l(q+2k-l) insertions into the (l-1)-fold divergence.
inline void suite_div2(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(3, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto sh = lift_symbol(S, cc);
        auto shf = std::make_shared<const EquivariantField>(sh);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            const auto xi = random_grade1(rng, spec.p, spec.q);
            std::vector<double> hv(xi.xi.begin(), xi.xi.end());
            for (int l = 1; l <= std::min(3, k); ++l) {
                const auto lhs_a =
                    vertical_lie(divergence_field(*shf, cc, l), cc.layout, u, xi);
                const auto lhs_b =
                    divergence(vertical_lie_field(*shf, cc.layout, xi), cc, u, l);
                SymTensor<Jet> lhs(lhs_a.dim(), lhs_a.degree(), lhs_a.variance());
                for (int r = 0; r < lhs.size(); ++r)
                    lhs.comp(r) = lhs_a.comp(r) - lhs_b.comp(r);
                auto rhs = slot_insert(hv, divergence(sh, cc, u, l - 1));
                for (int r = 0; r < rhs.size(); ++r)
                    rhs.comp(r) *= l * (spec.q + 2.0 * k - l);
                std::ostringstream ex;
                ex << "l=" << l;
                worst.feed(tensor_gap(project_transverse(lhs, spec.p),
                                      project_transverse(rhs, spec.p)),
                           describe(spec, ci, m, ex.str()));
            }
        }
    }
}

/// Covector-direction response of iterated derivatives: the commutator is
/// -k(k-1) times the symmetric product with the covector.
inline void suite_nablag1(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        std::vector<int> slots(n);
        for (int i = 0; i < n; ++i) slots[i] = i;
        const ScalarField f = random_poly_field(rng, slots, 3, 1.0);
        const auto fh = lift_function(f, cc);
        auto fhf = std::make_shared<const EquivariantField>(fh);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            const auto xi = random_grade1(rng, spec.p, spec.q);
            SymTensor<Jet> h1(n, 1, Variance::Cov);
            for (int j = 0; j < n; ++j) {
                MultiIndex g(n, 0);
                g[j] = 1;
                h1[g] = Jet(xi.xi[j]);
            }
            for (int k = 1; k <= std::min(4, spec.k); ++k) {
                const auto lhs_a =
                    vertical_lie(derivative_field(*fhf, cc, k), cc.layout, u, xi);
                const auto lhs_b =
                    invariant_derivative(vertical_lie_field(*fhf, cc.layout, xi), cc, u, k);
                SymTensor<Jet> lhs(n, k, Variance::Cov);
                for (int r = 0; r < lhs.size(); ++r)
                    lhs.comp(r) = lhs_a.comp(r) - lhs_b.comp(r);
                auto rhs = sym_product(invariant_derivative(fh, cc, u, k - 1), h1);
                for (int r = 0; r < rhs.size(); ++r) rhs.comp(r) *= -k * (k - 1.0);
                std::ostringstream ex;
                ex << "k=" << k;
                worst.feed(tensor_gap(lhs, rhs), describe(spec, ci, m, ex.str()));
            }
        }
    }
}

/// Infinitesimal equivariance of the lifts: linear-block directions act by
/// the derived slot action, covector directions act trivially.
inline void suite_invalg(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = generic_symbol(c, k, rng);
        const auto sh = lift_symbol(S, cc);
        const auto f = random_leaf_function(c, rng);
        const auto fh = lift_function(f, cc);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            const auto k0 = random_grade0(rng, spec.p, spec.q);
            const auto lie0 = vertical_lie(sh, cc.layout, u, k0);
            const auto rs = rho_star(sh.eval(u), k0.m0);
            double scale = 0.0, w0 = 0.0;
            for (int r = 0; r < lie0.size(); ++r) {
                scale = std::max(scale, std::fabs(rs.comp(r).std()));
                w0 = std::max(w0, std::fabs((lie0.comp(r) + rs.comp(r)).std()));
            }
            worst.feed(w0 / (1.0 + scale), describe(spec, ci, m, "linear direction"));
            const auto xi = random_grade1(rng, spec.p, spec.q);
            const auto lie1 = vertical_lie(sh, cc.layout, u, xi);
            double w1 = 0.0;
            for (int r = 0; r < lie1.size(); ++r)
                w1 = std::max(w1, std::fabs(lie1.comp(r).std()));
            worst.feed(w1, describe(spec, ci, m, "covector direction"));
            const auto lf0 = vertical_lie(fh, cc.layout, u, k0);
            const auto lf1 = vertical_lie(fh, cc.layout, u, xi);
            worst.feed(std::max(std::fabs(lf0.comp(0).std()), std::fabs(lf1.comp(0).std())),
                       describe(spec, ci, m, "lifted function"));
        }
    }
}

/// Leaf-constant functions have transversally supported iterated derivatives.
inline void suite_prop_inv(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto f = random_leaf_function(c, rng);
        const auto fh = lift_function(f, cc);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            for (int k = 1; k <= std::min(3, spec.k); ++k) {
                const auto t = invariant_derivative(fh, cc, u, k);
                const auto gs = multi_indices(n, k);
                double scale = 0.0;
                for (int r = 0; r < t.size(); ++r)
                    scale = std::max(scale, std::fabs(t.comp(r).std()));
                for (std::size_t r = 0; r < gs.size(); ++r) {
                    bool tangential = false;
                    for (int i = 0; i < spec.p; ++i) tangential |= gs[r][i] > 0;
                    if (!tangential) continue;
                    std::ostringstream ex;
                    ex << "k=" << k;
                    worst.feed(std::fabs(t.comp(static_cast<int>(r)).std()) / (1.0 + scale),
                               describe(spec, ci, m, ex.str()));
                }
            }
        }
    }
}

/// The quantization pairing reduces to the pairing of transverse projections
/// when the function factor is leaf-constant.
inline void suite_remark_pairing(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(2, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = generic_symbol(c, k, rng);
        const auto sh = lift_symbol(S, cc);
        const auto f = random_leaf_function(c, rng);
        const auto fh = lift_function(f, cc);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto u = make_jet_point(
                bundle_coords(cc.layout, m, random_adapted_h(rng, spec.p, spec.q)));
            for (int l = 0; l <= k; ++l) {
                const auto dv = divergence(sh, cc, u, l);
                const auto nf = invariant_derivative(fh, cc, u, k - l);
                const Jet full = pair(dv, nf);
                const Jet proj =
                    pair(project_transverse(dv, spec.p), project_transverse(nf, spec.p));
                std::ostringstream ex;
                ex << "l=" << l;
                worst.feed(std::fabs((full - proj).std()) / (1.0 + std::fabs(proj.std())),
                           describe(spec, ci, m, ex.str()));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Quantization suites.

/// The quantization value does not depend on the frame used to evaluate it.
inline void suite_fiber_independence(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const double q0 =
                quantize_at(cc, S, f, make_jet_point(canonical_point(cc.layout, m))).std();
            for (int fi = 0; fi < 2; ++fi) {
                const auto h = random_adapted_h(rng, spec.p, spec.q);
                const double q1 =
                    quantize_at(cc, S, f,
                                make_jet_point(bundle_coords(cc.layout, m, h)))
                        .std();
                worst.feed(std::fabs(q1 - q0) / (1.0 + std::fabs(q0)),
                           describe(spec, ci, m));
            }
        }
    }
}

/// Top-order coefficients of the extracted operator equal the symbol
/// components at the expansion point.
inline void suite_principal_symbol(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = generic_symbol(c, k, rng);
        for (const auto& m : sample_points(c, std::max(1, spec.points / 2),
                                           spec.seed + 31 * ci)) {
            auto quantizer = [&](const ScalarField& g) {
                return quantize_adapted(conn, S, g, m);
            };
            const auto table = extract_operator(quantizer, c, m, k);
            const auto sv = S.eval(make_jet_point(m));
            double scale = 0.0;
            for (int r = 0; r < sv.size(); ++r)
                scale = std::max(scale, std::fabs(sv.comp(r).std()));
            for (int r = 0; r < sv.size(); ++r)
                worst.feed(
                    std::fabs(table.by_degree[k][r] - sv.comp(r).std()) / (1.0 + scale),
                    describe(spec, ci, m));
        }
    }
}

/// Degree-0 symbols quantize to multiplication by the symbol value.
inline void suite_k0_multiplication(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        std::vector<int> slots(n);
        for (int i = 0; i < n; ++i) slots[i] = i;
        SymbolField S;
        S.chart = c;
        S.degree = 0;
        S.comp = {random_poly_field(rng, slots, 2, 1.0)};
        const ScalarField f = random_poly_field(rng, slots, 3, 1.0);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const double expect = S.comp[0].at(m) * f.at(m);
            const double got = quantize_adapted(conn, S, f, m);
            worst.feed(std::fabs(got - expect) / (1.0 + std::fabs(expect)),
                       describe(spec, ci, m));
        }
    }
}

/// Degree-1 symbols quantize to the pure directional derivative: agreement
/// with a central finite difference, and zero action on constants.
inline void suite_k1_derivation(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    const double step = 1e-4;
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = generic_symbol(c, 1, rng);
        std::vector<int> slots(n);
        for (int i = 0; i < n; ++i) slots[i] = i;
        const ScalarField f = random_poly_field(rng, slots, 3, 1.0);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto sv = S.eval(make_jet_point(m));
            double fd = 0.0;
            for (int i = 0; i < n; ++i) {
                std::vector<double> mp(m), mm(m);
                mp[i] += step;
                mm[i] -= step;
                fd += sv.comp(i).std() * (f.at(mp) - f.at(mm)) / (2.0 * step);
            }
            const double got = quantize_adapted(conn, S, f, m);
            worst.feed(std::fabs(got - fd) / (1.0 + std::fabs(fd)),
                       describe(spec, ci, m, "finite difference"));
            const double on_const =
                quantize_adapted(conn, S, ScalarField::constant(1.0), m);
            worst.feed(std::fabs(on_const), describe(spec, ci, m, "constant function"));
        }
    }
}

/// Projectively shifted connections give the same quantization.
inline void suite_projective_invariance(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(2, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        const auto pts = sample_points(c, spec.points, spec.seed + 31 * ci);
        std::vector<double> q0(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            q0[i] = quantize_adapted(conn, S, f, pts[i]);
        for (int a = 0; a < 5; ++a) {  // five independent shift directions
            const auto shifted =
                projective_shift(conn, random_foliated_oneform(c, rng));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double q1 = quantize_adapted(shifted, S, f, pts[i]);
                std::ostringstream ex;
                ex << "shift " << a;
                worst.feed(std::fabs(q1 - q0[i]) / (1.0 + std::fabs(q0[i])),
                           describe(spec, ci, pts[i], ex.str()));
            }
        }
    }
}

/// Pushing every input through an adapted diffeomorphism maps the output by
/// composition with the map.  The scalar entry point evaluates at the
/// canonical frame, and the map's bundle lift moves canonical frames by its
/// differential, so the comparison additionally needs the frame independence
/// of the value -- i.e. data from the quantization's own domain.
inline void suite_naturality_pushforward(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int n = c.n();
    const int k = std::max(2, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        const auto phi = random_adapted_diffeo(c, rng);
        const auto conn2 = pushforward(conn, phi);
        const auto s2 = pushforward(S, phi);
        const auto f2 = pushforward_function(f, phi);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const auto mj = apply_fields(phi.fwd, make_jet_point(m));
            std::vector<double> phim(n);
            for (int i = 0; i < n; ++i) phim[i] = mj[i].std();
            const double q0 = quantize_adapted(conn, S, f, m);
            const double q1 = quantize_adapted(conn2, s2, f2, phim);
            worst.feed(std::fabs(q1 - q0) / (1.0 + std::fabs(q0)), describe(spec, ci, m));
        }
    }
}

/// The quantization of adapted data applied to a leaf-constant function is
/// itself leaf-constant in the base point.
inline void suite_foliatedness_of_output(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    if (spec.p == 0) return;  // nothing tangential to vary
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto cc = make_normal_cartan(conn);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            std::vector<Jet> mj = make_jet_point(m);
            for (int i = 0; i < spec.p; ++i) mj[i] = Jet::seeded(m[i], i);
            const Jet qv =
                quantize_at(cc, S, f, canonical_point_jets(cc.layout, mj));
            const double scale = 1.0 + std::fabs(qv.std());
            for (int i = 0; i < spec.p; ++i)
                worst.feed(std::fabs(qv.eps_coeff(i).std()) / scale,
                           describe(spec, ci, m));
        }
    }
}

/// Quantizing adapted data agrees with reducing everything to the transverse
/// chart and quantizing there.
inline void suite_commutation(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(spec.p, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        const auto tconn = induce_foliated(conn);
        const auto ts = reduce_symbol(S);
        const auto tf = reduce_function(f, c);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const double qa = quantize_adapted(conn, S, f, m);
            const std::vector<double> y(m.begin() + spec.p, m.end());
            const double qt = quantize_foliated(tconn, ts, tf, y);
            worst.feed(std::fabs(qt - qa) / (1.0 + std::fabs(qa)), describe(spec, ci, m));
        }
    }
}

/// On a chart with no tangential directions both entry points and the reduced
/// pipeline are the same computation.
inline void suite_p0_consistency(const CheckSpec& spec, Worst& worst) {
    const auto c = box_chart(0, spec.q);
    const int k = std::max(1, spec.k);
    for (int ci = 0; ci < spec.connections; ++ci) {
        Rng rng(spec.seed + 1000003ULL * ci);
        const auto conn = random_adapted_connection(c, rng);
        const auto S = random_foliated_symbol(c, k, rng);
        const auto f = random_leaf_function(c, rng);
        const auto tconn = induce_foliated(conn);
        const auto ts = reduce_symbol(S);
        const auto tf = reduce_function(f, c);
        for (const auto& m : sample_points(c, spec.points, spec.seed + 31 * ci)) {
            const double qa = quantize_adapted(conn, S, f, m);
            const double qf = quantize_foliated(conn, S, f, m);
            const double qr = quantize_foliated(tconn, ts, tf, m);
            const double scale = 1.0 + std::fabs(qa);
            worst.feed(std::fabs(qf - qa) / scale, describe(spec, ci, m, "entry points"));
            worst.feed(std::fabs(qr - qa) / scale,
                       describe(spec, ci, m, "reduced pipeline"));
        }
    }
}

/// Codimension-one charts must be rejected by the Cartan and quantization
/// entry points; the suite passes exactly when they are.
inline void suite_q1_rejection(const CheckSpec& spec, Worst& worst) {
    const FoliatedChart bad{std::max(1, spec.p), 1,
                            Box{std::vector<double>(std::max(1, spec.p) + 1, -1.0),
                                std::vector<double>(std::max(1, spec.p) + 1, 1.0)}};
    const AdaptedConnection conn(bad);
    bool cartan_rejected = false, quantize_rejected = false;
    try {
        (void)make_normal_cartan(conn);
    } catch (const EvalError&) {
        cartan_rejected = true;
    }
    try {
        SymbolField S;
        S.chart = bad;
        S.degree = 0;
        S.comp = {ScalarField::constant(1.0)};
        (void)quantize_adapted(conn, S, ScalarField::constant(1.0),
                               std::vector<double>(bad.n(), 0.0));
    } catch (const EvalError&) {
        quantize_rejected = true;
    }
    worst.feed(cartan_rejected ? 0.0 : 1.0, "codimension-one Cartan construction");
    worst.feed(quantize_rejected ? 0.0 : 1.0, "codimension-one quantization");
}

}  // namespace detail

/// Registry order: construction suites, identity suites, quantization suites.
inline const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{
        "structure-equation",
        "bianchi",
        "normality",
        "equ2-linear-response",
        "link",
        "gonabla",
        "goinv",
        "div1",
        "div2",
        "nablag1",
        "invalg",
        "prop-inv",
        "remark-pairing",
        "fiber-independence",
        "principal-symbol",
        "k0-multiplication",
        "k1-derivation",
        "projective-invariance",
        "naturality-pushforward",
        "foliatedness-of-output",
        "commutation",
        "p0-consistency",
        "q1-rejection",
    };
    return names;
}

inline CheckReport run_suite(const CheckSpec& spec) {
    using SuiteFn = void (*)(const CheckSpec&, detail::Worst&);
    struct Entry {
        const char* name;
        SuiteFn fn;
    };
    static const Entry table[] = {
        {"structure-equation", &detail::suite_structure_equation},
        {"bianchi", &detail::suite_bianchi},
        {"normality", &detail::suite_normality},
        {"equ2-linear-response", &detail::suite_equ2_linear_response},
        {"link", &detail::suite_link},
        {"gonabla", &detail::suite_gonabla},
        {"goinv", &detail::suite_goinv},
        {"div1", &detail::suite_div1},
        {"div2", &detail::suite_div2},
        {"nablag1", &detail::suite_nablag1},
        {"invalg", &detail::suite_invalg},
        {"prop-inv", &detail::suite_prop_inv},
        {"remark-pairing", &detail::suite_remark_pairing},
        {"fiber-independence", &detail::suite_fiber_independence},
        {"principal-symbol", &detail::suite_principal_symbol},
        {"k0-multiplication", &detail::suite_k0_multiplication},
        {"k1-derivation", &detail::suite_k1_derivation},
        {"projective-invariance", &detail::suite_projective_invariance},
        {"naturality-pushforward", &detail::suite_naturality_pushforward},
        {"foliatedness-of-output", &detail::suite_foliatedness_of_output},
        {"commutation", &detail::suite_commutation},
        {"p0-consistency", &detail::suite_p0_consistency},
        {"q1-rejection", &detail::suite_q1_rejection},
    };
    for (const Entry& e : table) {
        if (spec.name == e.name) {
            detail::Worst worst;
            e.fn(spec, worst);
            CheckReport rep;
            rep.name = spec.name;
            rep.worst = worst.value;
            rep.tolerance = spec.tolerance;
            rep.pass = worst.value <= spec.tolerance;
            rep.worst_case = worst.where;
            return rep;
        }
    }
    std::string msg = "unknown check suite '" + spec.name + "'; valid names:";
    for (const auto& nm : check_names()) msg += " " + nm;
    throw EvalError(msg);
}

/// Default spec for every registered suite: moderate sizes, on the shapes
/// where each suite is most meaningful.
inline std::vector<CheckSpec> default_specs(std::uint64_t seed = 20260814) {
    auto spec = [seed](const std::string& name, int p, int q, int k, double tol,
                       int conns = 2, int points = 3) {
        CheckSpec s;
        s.name = name;
        s.p = p;
        s.q = q;
        s.k = k;
        s.connections = conns;
        s.points = points;
        s.seed = seed;
        s.tolerance = tol;
        return s;
    };
    return {
        spec("structure-equation", 1, 2, 2, 1e-9),
        spec("bianchi", 1, 2, 2, 1e-9),
        spec("normality", 1, 2, 2, 1e-9),
        spec("equ2-linear-response", 1, 2, 2, 1e-6),
        spec("link", 1, 2, 2, 1e-9),
        spec("gonabla", 1, 2, 3, 1e-8),
        spec("goinv", 1, 2, 3, 1e-8),
        spec("div1", 1, 2, 3, 1e-8),
        spec("div2", 1, 2, 3, 1e-8),
        spec("nablag1", 1, 2, 4, 1e-8),
        spec("invalg", 1, 2, 2, 1e-9),
        spec("prop-inv", 1, 2, 3, 1e-8),
        spec("remark-pairing", 1, 2, 3, 1e-8),
        spec("fiber-independence", 1, 2, 3, 1e-8),
        spec("principal-symbol", 1, 2, 2, 1e-8),
        spec("k0-multiplication", 1, 2, 0, 1e-10),
        spec("k1-derivation", 1, 2, 1, 1e-5),
        spec("projective-invariance", 1, 2, 2, 1e-7),
        spec("naturality-pushforward", 1, 2, 2, 1e-7),
        spec("foliatedness-of-output", 1, 2, 2, 1e-8),
        spec("commutation", 1, 2, 2, 1e-8),
        spec("p0-consistency", 0, 2, 2, 1e-10),
        spec("q1-rejection", 1, 1, 0, 0.0, 1, 1),
    };
}

inline std::vector<CheckReport> run_all(std::uint64_t seed = 20260814) {
    const auto registry = default_specs(seed);
    std::vector<CheckReport> out;
    out.reserve(registry.size());
    for (const auto& s : registry) out.push_back(run_suite(s));
    return out;
}

}  // namespace folq
