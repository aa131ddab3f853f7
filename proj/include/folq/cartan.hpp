// SPDX-License-Identifier: MIT
//
// The adapted parallelism.  From a torsion-free adapted connection this
// module builds, over the trivial bundle chart x H, a coframe omega that
// identifies every tangent space with the model algebra
//
//   translations (n)  +  block linear maps (pattern)  +  covectors (q),
//
// normalized so that the transverse traces of its curvature vanish.  The
// fiber group H consists of block-triangular linear parts A together with a
// transverse covector row alpha, acting on frames through the quadratic
// include_H jets.
//
// Bundle coordinates are flat vectors [chart point | pattern entries of A |
// alpha row]; algebra values use the same slots, which makes the coframe a
// square matrix per point.  All evaluation is over the jet ring, so the same
// code path yields values, directional derivatives, and curvature.

#pragma once

#include <folq/chart.hpp>
#include <folq/generators.hpp>
#include <folq/jet_group.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace folq {

/// Enumeration of the admissible linear-block entries: row-major over (i, j)
/// skipping the forbidden lower-left block (transverse row, tangential
/// column), which the fiber group and algebra both respect.
struct FiberLayout {
    int p = 0;
    int q = 2;
    std::vector<std::pair<int, int>> pattern;
    std::vector<int> pattern_slot;  // n*n entries, -1 where forbidden

    int n() const { return p + q; }
    int pdim() const { return static_cast<int>(pattern.size()); }
    int fdim() const { return pdim() + q; }
    int gdim() const { return n() + fdim(); }
};

inline FiberLayout make_layout(int p, int q) {
    FiberLayout layout{p, q, {}, {}};
    const int n = p + q;
    layout.pattern_slot.assign(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i >= p && j < p) continue;
            layout.pattern_slot[i * n + j] = static_cast<int>(layout.pattern.size());
            layout.pattern.emplace_back(i, j);
        }
    return layout;
}

template <typename R>
std::vector<R> lie_flatten(const FiberLayout& layout, const LieG<R>& a) {
    const int n = layout.n();
    std::vector<R> out(layout.gdim(), R(0.0));
    for (int i = 0; i < n; ++i) out[i] = a.v[i];
    for (int s = 0; s < layout.pdim(); ++s)
        out[n + s] = a.m0(layout.pattern[s].first, layout.pattern[s].second);
    for (int j = layout.p; j < n; ++j) out[n + layout.pdim() + (j - layout.p)] = a.xi[j];
    return out;
}

template <typename R>
LieG<R> lie_unflatten(const FiberLayout& layout, std::span<const R> flat) {
    const int n = layout.n();
    LieG<R> a = lie_zero<R>(layout.p, layout.q);
    for (int i = 0; i < n; ++i) a.v[i] = flat[i];
    for (int s = 0; s < layout.pdim(); ++s)
        a.m0(layout.pattern[s].first, layout.pattern[s].second) = flat[n + s];
    for (int j = layout.p; j < n; ++j) a.xi[j] = flat[n + layout.pdim() + (j - layout.p)];
    return a;
}

template <typename R>
LieG<R> lie_unflatten(const FiberLayout& layout, const std::vector<R>& flat) {
    return lie_unflatten(layout, std::span<const R>(flat));
}

/// Bundle coordinates of the point (m, h).  The fiber element must respect
/// the block pattern; entries outside it have no coordinate slot.
inline std::vector<double> bundle_coords(const FiberLayout& layout,
                                         std::span<const double> m,
                                         const HElement<double>& h) {
    const int n = layout.n();
    std::vector<double> u(layout.gdim(), 0.0);
    for (int i = 0; i < n; ++i) u[i] = m[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (layout.pattern_slot[i * n + j] < 0 &&
                std::fabs(h.a(i, j)) > detail::kAlgebraTol)
                throw AlgebraError("fiber element leaves the adapted block pattern");
    for (int j = 0; j < layout.p; ++j)
        if (std::fabs(h.alpha[j]) > detail::kAlgebraTol)
            throw AlgebraError("fiber covector has tangential support");
    for (int s = 0; s < layout.pdim(); ++s)
        u[n + s] = h.a(layout.pattern[s].first, layout.pattern[s].second);
    for (int j = layout.p; j < n; ++j)
        u[n + layout.pdim() + (j - layout.p)] = h.alpha[j];
    return u;
}

/// Coordinates of the canonical frame over m: identity linear part, zero
/// covector row.
inline std::vector<double> canonical_point(const FiberLayout& layout,
                                           std::span<const double> m) {
    const int n = layout.n();
    std::vector<double> u(layout.gdim(), 0.0);
    for (int i = 0; i < n; ++i) u[i] = m[i];
    for (int s = 0; s < layout.pdim(); ++s)
        if (layout.pattern[s].first == layout.pattern[s].second) u[n + s] = 1.0;
    return u;
}

inline std::vector<Jet> canonical_point_jets(const FiberLayout& layout,
                                             std::span<const Jet> m) {
    const int n = layout.n();
    std::vector<Jet> u(layout.gdim(), Jet(0.0));
    for (int i = 0; i < n; ++i) u[i] = m[i];
    for (int s = 0; s < layout.pdim(); ++s)
        if (layout.pattern[s].first == layout.pattern[s].second) u[n + s] = Jet(1.0);
    return u;
}

/// Fiber element encoded in a bundle point (entries off the pattern are
/// exactly zero by construction).
inline HElement<Jet> to_h(const FiberLayout& layout, std::span<const Jet> u) {
    const int n = layout.n();
    HElement<Jet> h{Mat<Jet>(n, n), std::vector<Jet>(n, Jet(0.0))};
    for (int s = 0; s < layout.pdim(); ++s)
        h.a(layout.pattern[s].first, layout.pattern[s].second) = u[n + s];
    for (int j = layout.p; j < n; ++j) h.alpha[j] = u[n + layout.pdim() + (j - layout.p)];
    return h;
}

/// The 2-jet of the exponential chart of the connection at m: the frame with
/// identity linear part whose quadratic part is minus the Christoffel array.
inline Jet2Frame<Jet> canonical_section(const AdaptedConnection& conn,
                                        std::span<const Jet> m) {
    const int n = conn.n();
    Jet2Frame<Jet> u{std::vector<Jet>(m.begin(), m.end()), Mat<Jet>::identity(n),
                     conn.eval_gamma(m)};
    for (Jet& c : u.quad) c = -c;
    return u;
}

/// How the covector rows of the coframe are chosen.  `normal` solves the
/// transverse trace conditions; the other modes exist to demonstrate that the
/// trace conditions pin the construction (checks must fail under them).
enum class DeformationMode { normal, zero, flipped_transverse_trace, custom };

struct AdaptedCartan {
    AdaptedConnection conn;
    FiberLayout layout;
    DeformationMode mode = DeformationMode::normal;
    AdaptedConnection::DenseFn custom;  // n*n entries, row-major (j*n + k)
};

inline AdaptedCartan make_cartan(AdaptedConnection conn, DeformationMode mode) {
    require_valid(conn.chart());
    FiberLayout layout = make_layout(conn.chart().p, conn.chart().q);
    return AdaptedCartan{std::move(conn), std::move(layout), mode, {}};
}

inline AdaptedCartan make_normal_cartan(AdaptedConnection conn) {
    return make_cartan(std::move(conn), DeformationMode::normal);
}

inline AdaptedCartan make_custom_cartan(AdaptedConnection conn,
                                        AdaptedConnection::DenseFn deformation) {
    AdaptedCartan cc = make_cartan(std::move(conn), DeformationMode::custom);
    cc.custom = std::move(deformation);
    return cc;
}

/// Identity alias for the transverse chart: the same construction runs on a
/// connection with p = 0.
inline AdaptedCartan foliated_cartan(FoliatedConnection conn) {
    return make_normal_cartan(std::move(conn));
}

namespace detail {

struct GammaDeform {
    std::vector<Jet> gamma;  // n^3 Christoffel entries at the point
    std::vector<Jet> a;      // n^2 covector rows, (j*n + k)
};

/// Christoffel entries and the covector deformation at a (jet) chart point.
/// The normal deformation comes from the two transverse traces of the plain
/// curvature tensor, expanded directly in Christoffel partials so only n + 1
/// evaluations of the connection are needed.
inline GammaDeform gamma_and_deformation(const AdaptedCartan& cc,
                                         std::span<const Jet> pt) {
    const FoliatedChart& ch = cc.conn.chart();
    const int n = ch.n(), p = ch.p, q = ch.q;
    GammaDeform out;
    out.gamma = cc.conn.eval_gamma(pt);
    out.a.assign(static_cast<std::size_t>(n) * n, Jet(0.0));
    if (cc.mode == DeformationMode::zero) return out;
    if (cc.mode == DeformationMode::custom) {
        out.a = cc.custom(pt);
        return out;
    }

    const int slot = fresh_slot(pt);
    std::vector<std::vector<Jet>> dg(n);
    {
        std::vector<Jet> dir(n, Jet(0.0));
        for (int d = 0; d < n; ++d) {
            dir[d] = Jet(1.0);
            const std::vector<Jet> lifted = lift_point(pt, dir, slot);
            dg[d] = cc.conn.eval_gamma(lifted);
            for (Jet& e : dg[d]) e = e.eps_coeff(slot);
            dir[d] = Jet(0.0);
        }
    }
    const auto& g = out.gamma;
    auto G = [n](int i, int k, int l) { return (i * n + k) * n + l; };

    // Transverse traces of the curvature tensor R^i_{jkl} = d_k G^i_{lj} -
    // d_l G^i_{kj} + G^i_{ka} G^a_{lj} - G^i_{la} G^a_{kj}.
    auto trace_t = [&](int j, int k) {  // sum_i R^i_{jik}, i transverse
        Jet acc(0.0);
        for (int i = p; i < n; ++i) {
            acc += dg[i][G(i, k, j)] - dg[k][G(i, i, j)];
            for (int a = 0; a < n; ++a) {
                add_assign_mul(acc, g[G(i, i, a)], g[G(a, k, j)]);
                sub_assign_mul(acc, g[G(i, k, a)], g[G(a, i, j)]);
            }
        }
        return acc;
    };
    auto trace_u = [&](int j, int k) {  // sum_i R^i_{ijk}, i transverse
        Jet acc(0.0);
        for (int i = p; i < n; ++i) {
            acc += dg[j][G(i, k, i)] - dg[k][G(i, j, i)];
            for (int a = 0; a < n; ++a) {
                add_assign_mul(acc, g[G(i, j, a)], g[G(a, k, i)]);
                sub_assign_mul(acc, g[G(i, k, a)], g[G(a, j, i)]);
            }
        }
        return acc;
    };

    const double sign = cc.mode == DeformationMode::flipped_transverse_trace ? 1.0 : -1.0;
    for (int j = p; j < n; ++j) {
        for (int k = 0; k < p; ++k)
            out.a[j * n + k] = (sign / q) * trace_t(j, k);
        for (int k = p; k < n; ++k)
            out.a[j * n + k] = (1.0 / ((q + 1) * (q - 1))) * trace_u(j, k) +
                               (sign / (q - 1)) * trace_t(j, k);
    }
    return out;
}

}  // namespace detail

/// Covector deformation rows at a chart point, row-major (j*n + k).
inline std::vector<Jet> deformation_tensor(const AdaptedCartan& cc,
                                           std::span<const Jet> pt) {
    return detail::gamma_and_deformation(cc, pt).a;
}

/// The coframe at one bundle point: a gdim x gdim matrix over jets mapping
/// coordinate tangents to algebra coordinates, with its factorization.
struct OmegaFrame {
    Mat<Jet> m;
    Lu<Jet> lu;
};

inline OmegaFrame omega_frame(const AdaptedCartan& cc, std::span<const Jet> u) {
    const FiberLayout& L = cc.layout;
    const int n = L.n(), p = L.p, pd = L.pdim(), gd = L.gdim();

    const HElement<Jet> h = to_h(L, u);
    const Mat<Jet> binv = mat_inverse(h.a);
    std::vector<Jet> beta(n, Jet(0.0));  // bottom row of h^{-1}
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sub_assign_mul(beta[j], h.alpha[i], binv(i, j));

    const auto gad = detail::gamma_and_deformation(cc, u.first(n));

    Mat<Jet> w(gd, gd);
    // Chart columns: the conjugate by h^{-1} of translation + Christoffel
    // linear part + deformation covector, written out block by block.
    Mat<Jet> m0(n, n), m0p(n, n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m0(i, j) = gad.gamma[(i * n + j) * n + k];
        for (int i = 0; i < n; ++i) w(i, k) = binv(i, k);
        m0p = binv * m0 * h.a;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) add_assign_mul(m0p(i, j), binv(i, k), h.alpha[j]);
            m0p(i, i) -= beta[k];
        }
        for (int s = 0; s < pd; ++s)
            w(n + s, k) = m0p(L.pattern[s].first, L.pattern[s].second);
        for (int j = p; j < n; ++j) {
            Jet acc = beta[k] * h.alpha[j];
            for (int a = 0; a < n; ++a) {
                Jet row = gad.a[a * n + k];
                for (int i = 0; i < n; ++i) add_assign_mul(row, beta[i], m0(i, a));
                add_assign_mul(acc, row, h.a(a, j));
            }
            w(n + pd + (j - p), k) = acc;
        }
    }
    // Fiber columns: the left-invariant form of H.  For a pattern direction
    // (i, j) this is column i of h^{-1} placed in column j of the linear
    // block plus the covector row beta_i e_j; covector directions pass
    // through unchanged.
    for (int s = 0; s < pd; ++s) {
        const auto [fi, fj] = L.pattern[s];
        for (int t = 0; t < pd; ++t)
            if (L.pattern[t].second == fj) w(n + t, n + s) = binv(L.pattern[t].first, fi);
        if (fj >= p) w(n + pd + (fj - p), n + s) = beta[fi];
    }
    for (int j = 0; j < L.q; ++j) w(n + pd + j, n + pd + j) = Jet(1.0);

    Lu<Jet> lu(w);
    return OmegaFrame{std::move(w), std::move(lu)};
}

inline std::vector<Jet> omega_apply(const OmegaFrame& f, std::span<const Jet> tangent) {
    return mat_vec(f.m, tangent);
}

inline std::vector<Jet> omega_solve(const OmegaFrame& f, std::span<const Jet> value) {
    return f.lu.solve(value);
}

/// Curvature of the coframe against its own frame fields: component a of the
/// 2-form on the k-th and l-th frame directions sits at (k*n + l)*gdim + a.
/// Frame fields have constant coframe value, so the 2-form reduces to minus
/// the coframe of their commutator.
inline std::vector<Jet> curvature_components(const AdaptedCartan& cc,
                                             std::span<const Jet> u) {
    const FiberLayout& L = cc.layout;
    const int n = L.n(), gd = L.gdim();
    const OmegaFrame f = omega_frame(cc, u);
    const int slot = fresh_slot(u);

    std::vector<std::vector<Jet>> frame(n);
    std::vector<Jet> unit(gd, Jet(0.0));
    for (int k = 0; k < n; ++k) {
        unit[k] = Jet(1.0);
        frame[k] = f.lu.solve(unit);
        unit[k] = Jet(0.0);
    }

    std::vector<std::vector<Jet>> dframe(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const std::vector<Jet> lifted = lift_point(u, frame[k], slot);
        const OmegaFrame fk = omega_frame(cc, lifted);
        for (int l = 0; l < n; ++l) {
            unit[l] = Jet(1.0);
            std::vector<Jet> v = fk.lu.solve(unit);
            unit[l] = Jet(0.0);
            for (Jet& c : v) c = c.eps_coeff(slot);
            dframe[k * n + l] = std::move(v);
        }
    }

    std::vector<Jet> kappa(static_cast<std::size_t>(n) * n * gd);
    std::vector<Jet> comm(gd);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            for (int a = 0; a < gd; ++a)
                comm[a] = dframe[k * n + l][a] - dframe[l * n + k][a];
            const std::vector<Jet> w = mat_vec(f.m, comm);
            for (int a = 0; a < gd; ++a) kappa[(k * n + l) * gd + a] = -w[a];
        }
    return kappa;
}

inline constexpr double kNormalTol = 1e-8;
inline constexpr double kLinkTol = 1e-9;

struct NormalityReport {
    bool ok = false;
    double torsion = 0.0;  // worst translation component of the curvature
    double trace1 = 0.0;   // worst sum_i kappa^i_{j i k}, i transverse
    double trace2 = 0.0;   // worst sum_i kappa^i_{i j k}, i transverse
};

/// Evaluates the torsion-freeness and the two transverse trace conditions of
/// the curvature on canonical frames over sampled chart points.
inline NormalityReport check_normal(const AdaptedCartan& cc, int count,
                                    std::uint64_t seed) {
    const FiberLayout& L = cc.layout;
    const int n = L.n(), p = L.p, gd = L.gdim();
    NormalityReport rep;
    for (const auto& m : sample_points(cc.conn.chart(), count, seed)) {
        const auto u = make_jet_point(canonical_point(L, m));
        const std::vector<Jet> kap = curvature_components(cc, u);
        auto block = [&](int i, int j, int k, int l) {
            const int s = L.pattern_slot[i * n + j];
            return s < 0 ? 0.0 : kap[(k * n + l) * gd + n + s].std();
        };
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    rep.torsion =
                        std::max(rep.torsion, std::fabs(kap[(k * n + l) * gd + i].std()));
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double t = 0.0, uu = 0.0;
                for (int i = p; i < n; ++i) {
                    t += block(i, j, i, k);
                    uu += block(i, i, j, k);
                }
                rep.trace1 = std::max(rep.trace1, std::fabs(t));
                rep.trace2 = std::max(rep.trace2, std::fabs(uu));
            }
    }
    rep.ok = rep.torsion < kNormalTol && rep.trace1 < kNormalTol && rep.trace2 < kNormalTol;
    return rep;
}

struct LinkReport {
    bool ok = false;
    double worst = 0.0;
};

/// The transverse projection intertwines the two coframes: projecting a
/// bundle point, a tangent, and the resulting algebra value of the adapted
/// coframe must reproduce the transverse-chart coframe.
inline LinkReport check_link(const AdaptedCartan& adapted, const AdaptedCartan& transverse,
                             int count, std::uint64_t seed) {
    const FiberLayout& la = adapted.layout;
    const FiberLayout& lf = transverse.layout;
    const int n = la.n(), p = la.p, q = la.q;
    if (lf.p != 0 || lf.q != q)
        throw EvalError("check_link: transverse side must live on the leaf-space chart");

    // Flat-index projection, shared by points, tangents, and algebra values.
    auto proj = [&](int r) -> int {
        if (r < n) return r >= p ? r - p : -1;
        if (r < n + la.pdim()) {
            const auto [i, j] = la.pattern[r - n];
            if (i >= p && j >= p) return q + lf.pattern_slot[(i - p) * q + (j - p)];
            return -1;
        }
        return q + lf.pdim() + (r - n - la.pdim());
    };

    Rng rng(seed);
    const Box& box = adapted.conn.chart().domain;
    LinkReport rep;
    for (int it = 0; it < count; ++it) {
        std::vector<double> m(n);
        for (int i = 0; i < n; ++i) m[i] = rng.uniform(box.lo[i], box.hi[i]);
        const auto h = random_adapted_h(rng, p, q);
        const auto ua = bundle_coords(la, m, h);
        std::vector<double> xi(la.gdim());
        for (double& x : xi) x = rng.uniform(-1.0, 1.0);

        std::vector<double> uf(lf.gdim(), 0.0), xif(lf.gdim(), 0.0);
        for (int r = 0; r < la.gdim(); ++r)
            if (const int rf = proj(r); rf >= 0) {
                uf[rf] = ua[r];
                xif[rf] = xi[r];
            }

        const auto ga = omega_apply(omega_frame(adapted, make_jet_point(ua)),
                                    make_jet_point(xi));
        const auto gf = omega_apply(omega_frame(transverse, make_jet_point(uf)),
                                    make_jet_point(xif));
        for (int r = 0; r < la.gdim(); ++r)
            if (const int rf = proj(r); rf >= 0)
                rep.worst = std::max(rep.worst, std::fabs(ga[r].std() - gf[rf].std()));
    }
    rep.ok = rep.worst < kLinkTol;
    return rep;
}

}  // namespace folq
