// SPDX-License-Identifier: MIT
#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "folq/errors.hpp"
#include "folq/expr.hpp"
#include "folq/jets.hpp"
#include "folq/rng.hpp"
#include "folq/sym_tensor.hpp"

namespace folq {

/// Axis-aligned coordinate box; component i of every sampled point lies in
/// [lo[i], hi[i]].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// A coordinate chart split into p tangential coordinates x1..xp followed by
/// q >= 2 transverse coordinates y1..yq.  Indices 0..p-1 are tangential,
/// p..p+q-1 transverse.  "Leaf-constant" data may depend on the y block only.
struct FoliatedChart {
    int p = 0;
    int q = 2;
    Box domain;

    int n() const { return p + q; }
    bool is_tangential(int i) const { return i < p; }
    bool is_transverse(int i) const { return i >= p; }

    std::vector<double> center() const {
        std::vector<double> c(n());
        for (int i = 0; i < n(); ++i) c[i] = 0.5 * (domain.lo[i] + domain.hi[i]);
        return c;
    }

    /// The transverse slice of this chart: the q-dimensional chart whose
    /// coordinates are y1..yq with the same transverse box extents.
    FoliatedChart transverse_chart() const {
        Box b;
        b.lo.assign(domain.lo.begin() + p, domain.lo.end());
        b.hi.assign(domain.hi.begin() + p, domain.hi.end());
        return FoliatedChart{0, q, std::move(b)};
    }
};

/// Throws unless the chart has p >= 0, q >= 2 and box extents of matching
/// dimension.  Constructors stay cheap; boundary code calls this explicitly.
inline void require_valid(const FoliatedChart& chart) {
    if (chart.p < 0 || chart.q < 2)
        throw EvalError("chart requires p >= 0 and q >= 2");
    if (static_cast<int>(chart.domain.lo.size()) != chart.n() ||
        static_cast<int>(chart.domain.hi.size()) != chart.n())
        throw EvalError("box extents must match chart dimension");
}

inline std::vector<std::vector<double>> sample_points(const FoliatedChart& chart,
                                                      int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(count);
    for (auto& pt : pts) {
        pt.resize(chart.n());
        for (int i = 0; i < chart.n(); ++i)
            pt[i] = rng.uniform(chart.domain.lo[i], chart.domain.hi[i]);
    }
    return pts;
}

/// A scalar function of the chart coordinates, evaluable over the jet ring so
/// that partial derivatives come out of the same code path as plain values.
/// Default-constructed fields are identically zero.
class ScalarField {
  public:
    using Fn = std::function<Jet(std::span<const Jet>)>;

    ScalarField() = default;
    explicit ScalarField(Expression e)
        : fn_([e = std::move(e)](std::span<const Jet> pt) { return evaluate<Jet>(e, pt); }) {}
    explicit ScalarField(Fn fn) : fn_(std::move(fn)) {}

    static ScalarField constant(double v) {
        return ScalarField(Fn([v](std::span<const Jet>) { return Jet(v); }));
    }

    bool is_zero_literal() const { return !fn_; }

    Jet operator()(std::span<const Jet> pt) const { return fn_ ? fn_(pt) : Jet(0.0); }

    double at(std::span<const double> pt) const {
        return (*this)(make_jet_point(pt)).std();
    }
    double at(const std::vector<double>& pt) const {
        return at(std::span<const double>(pt));
    }

  private:
    Fn fn_;  // empty == zero field
};

inline std::vector<Jet> apply_fields(const std::vector<ScalarField>& comps,
                                     std::span<const Jet> pt) {
    std::vector<Jet> out(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = comps[i](pt);
    return out;
}

/// Torsion-free linear connection given by its Christoffel entries on a
/// foliated chart.  Entry (i, k, l) is the coefficient with upper index i and
/// symmetric lower pair (k, l); eval_gamma returns all n^3 entries in the flat
/// layout (i*n + k)*n + l.
///
/// Connections are either field-backed (set_gamma per entry) or backed by a
/// dense evaluator, which is how derived connections (shifts, pushforwards,
/// induced transverse connections) are represented without symbolic rewriting.
class AdaptedConnection {
  public:
    using DenseFn = std::function<std::vector<Jet>(std::span<const Jet>)>;

    explicit AdaptedConnection(FoliatedChart chart)
        : chart_(std::move(chart)),
          entries_(static_cast<std::size_t>(chart_.n()) * chart_.n() * chart_.n()) {}

    static AdaptedConnection dense(FoliatedChart chart, DenseFn fn) {
        AdaptedConnection c(std::move(chart));
        c.entries_.clear();
        c.dense_ = std::move(fn);
        return c;
    }

    const FoliatedChart& chart() const { return chart_; }
    int n() const { return chart_.n(); }

    /// Sets Gamma^i_{kl} and its mirror Gamma^i_{lk}.  Indices are 0-based.
    void set_gamma(int i, int k, int l, ScalarField f) {
        assert(!dense_ && "cannot set entries on a dense-backed connection");
        entries_[idx(i, k, l)] = f;
        entries_[idx(i, l, k)] = std::move(f);
    }

    ScalarField gamma(int i, int k, int l) const {
        if (!dense_) return entries_[idx(i, k, l)];
        const std::size_t at = idx(i, k, l);
        DenseFn fn = dense_;
        return ScalarField(ScalarField::Fn(
            [fn, at](std::span<const Jet> pt) { return fn(pt)[at]; }));
    }

    std::vector<Jet> eval_gamma(std::span<const Jet> pt) const {
        if (dense_) return dense_(pt);
        return apply_fields(entries_, pt);
    }

  private:
    std::size_t idx(int i, int k, int l) const {
        const int n = chart_.n();
        return static_cast<std::size_t>(i * n + k) * n + l;
    }

    FoliatedChart chart_;
    std::vector<ScalarField> entries_;
    DenseFn dense_;
};

/// A connection on the transverse chart (p = 0).  Same data layout; the alias
/// marks intent at API boundaries.
using FoliatedConnection = AdaptedConnection;

struct OneForm {
    FoliatedChart chart;
    std::vector<ScalarField> comp;  // n components, chart coordinate order
};

/// Symmetric contravariant tensor field of the given degree; comp holds the
/// sym_dim(n, degree) monomial coefficients in graded-lex rank order (the
/// order produced by multi_indices).  A dense evaluator, when present, takes
/// precedence over comp — see AdaptedConnection for the rationale.
struct SymbolField {
    FoliatedChart chart;
    int degree = 0;
    std::vector<ScalarField> comp;
    std::function<std::vector<Jet>(std::span<const Jet>)> dense;

    SymTensor<Jet> eval(std::span<const Jet> pt) const {
        SymTensor<Jet> s(chart.n(), degree, Variance::Contra);
        if (dense) {
            auto v = dense(pt);
            for (int r = 0; r < s.size(); ++r) s.comp(r) = v[r];
        } else {
            for (int r = 0; r < s.size(); ++r) s.comp(r) = comp[r](pt);
        }
        return s;
    }
};

/// Chart diffeomorphism given by forward and inverse component maps.  To
/// respect the foliation the transverse components of both maps must be
/// functions of y alone (validate_diffeo checks this, plus round-tripping).
struct AdaptedDiffeo {
    FoliatedChart chart;
    std::vector<ScalarField> fwd;
    std::vector<ScalarField> inv;
};

struct ValidationItem {
    std::string what;
    double magnitude = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationItem> items;
    double worst = 0.0;

    void add(std::string what, double magnitude) {
        ok = false;
        if (magnitude > worst) worst = magnitude;
        items.push_back({std::move(what), magnitude});
    }
};

namespace detail {

constexpr double kValidateTol = 1e-9;

/// Magnitude of d(field)/dx_d at pt (d must be a chart slot index).
inline double partial_at(const ScalarField& f, std::span<const double> pt, int d) {
    std::vector<Jet> j(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i)
        j[i] = static_cast<int>(i) == d ? Jet::seeded(pt[i], 0) : Jet(pt[i]);
    return f(j).eps_coeff(0).std();
}

inline std::string gamma_label(int i, int k, int l) {
    return "Gamma[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "][" +
           std::to_string(l + 1) + "]";
}

}  // namespace detail

/// Checks the two defining constraints of an adapted connection, plus lower
/// symmetry, at `count` sampled points:
///   (a) entries with transverse upper index and at least one tangential
///       lower index vanish;
///   (b) entries of the purely transverse block do not depend on x.
inline ValidationReport validate_adapted(const AdaptedConnection& conn, int count,
                                         std::uint64_t seed) {
    const FoliatedChart& c = conn.chart();
    const int n = c.n();
    const int p = c.p;
    ValidationReport rep;
    const auto pts = sample_points(c, count, seed);

    std::vector<std::vector<double>> partial_max;  // [x-dir][entry] over samples
    partial_max.assign(p, std::vector<double>(static_cast<std::size_t>(n) * n * n, 0.0));
    std::vector<double> value_max(static_cast<std::size_t>(n) * n * n, 0.0);
    std::vector<double> asym_max(value_max.size(), 0.0);

    for (const auto& pt : pts) {
        auto g = conn.eval_gamma(make_jet_point(pt));
        for (std::size_t e = 0; e < value_max.size(); ++e) {
            const double v = std::fabs(g[e].std());
            if (v > value_max[e]) value_max[e] = v;
        }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < k; ++l) {
                    const double d = std::fabs(g[(i * n + k) * n + l].std() -
                                               g[(i * n + l) * n + k].std());
                    auto& slot = asym_max[(static_cast<std::size_t>(i) * n + k) * n + l];
                    if (d > slot) slot = d;
                }
        for (int d = 0; d < p; ++d) {
            std::vector<Jet> j(pt.size());
            for (std::size_t i = 0; i < pt.size(); ++i)
                j[i] = static_cast<int>(i) == d ? Jet::seeded(pt[i], 0) : Jet(pt[i]);
            auto gj = conn.eval_gamma(j);
            for (std::size_t e = 0; e < value_max.size(); ++e) {
                const double v = std::fabs(gj[e].eps_coeff(0).std());
                if (v > partial_max[d][e]) partial_max[d][e] = v;
            }
        }
    }

    // Lower pairs are reported once, through their k >= l representative.
    for (int i = p; i < n; ++i)  // (a): transverse upper, tangential lower
        for (int k = 0; k < n; ++k)
            for (int l = 0; l <= k; ++l) {
                if (k >= p && l >= p) continue;
                const double v =
                    std::max(value_max[(static_cast<std::size_t>(i) * n + k) * n + l],
                             value_max[(static_cast<std::size_t>(i) * n + l) * n + k]);
                if (v > detail::kValidateTol)
                    rep.add(detail::gamma_label(i, k, l) +
                                " must vanish (transverse upper index with a "
                                "tangential lower index)",
                            v);
            }

    for (int i = p; i < n; ++i)  // (b): transverse block is leaf-constant
        for (int k = p; k < n; ++k)
            for (int l = p; l <= k; ++l)
                for (int d = 0; d < p; ++d) {
                    const double v = std::max(
                        partial_max[d][(static_cast<std::size_t>(i) * n + k) * n + l],
                        partial_max[d][(static_cast<std::size_t>(i) * n + l) * n + k]);
                    if (v > detail::kValidateTol)
                        rep.add(detail::gamma_label(i, k, l) + " depends on x" +
                                    std::to_string(d + 1),
                                v);
                }

    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < k; ++l) {
                const double v = asym_max[(static_cast<std::size_t>(i) * n + k) * n + l];
                if (v > detail::kValidateTol)
                    rep.add(detail::gamma_label(i, k, l) + " breaks lower-index symmetry",
                            v);
            }

    return rep;
}

/// A one-form is foliated when its tangential components vanish and its
/// transverse components do not depend on x.
inline ValidationReport validate_foliated_oneform(const OneForm& a, int count,
                                                  std::uint64_t seed) {
    const int n = a.chart.n();
    const int p = a.chart.p;
    assert(static_cast<int>(a.comp.size()) == n);
    ValidationReport rep;
    const auto pts = sample_points(a.chart, count, seed);
    for (int i = 0; i < n; ++i) {
        double vmax = 0.0;
        std::vector<double> dmax(p, 0.0);
        for (const auto& pt : pts) {
            if (i < p) {
                vmax = std::max(vmax, std::fabs(a.comp[i].at(pt)));
            } else {
                for (int d = 0; d < p; ++d)
                    dmax[d] = std::max(dmax[d], std::fabs(detail::partial_at(a.comp[i], pt, d)));
            }
        }
        if (i < p && vmax > detail::kValidateTol)
            rep.add("alpha[" + std::to_string(i + 1) + "] must vanish (tangential component)",
                    vmax);
        for (int d = 0; d < p; ++d)
            if (dmax[d] > detail::kValidateTol)
                rep.add("alpha[" + std::to_string(i + 1) + "] depends on x" +
                            std::to_string(d + 1),
                        dmax[d]);
    }
    return rep;
}

/// A function is foliated (leaf-constant) when it does not depend on x.
inline ValidationReport validate_foliated_function(const ScalarField& f,
                                                   const FoliatedChart& chart, int count,
                                                   std::uint64_t seed) {
    ValidationReport rep;
    const auto pts = sample_points(chart, count, seed);
    for (int d = 0; d < chart.p; ++d) {
        double dmax = 0.0;
        for (const auto& pt : pts)
            dmax = std::max(dmax, std::fabs(detail::partial_at(f, pt, d)));
        if (dmax > detail::kValidateTol)
            rep.add("f depends on x" + std::to_string(d + 1), dmax);
    }
    return rep;
}

/// Checks that a diffeomorphism respects the foliation (transverse components
/// of both maps are y-only) and that inv really inverts fwd on the chart box.
inline ValidationReport validate_diffeo(const AdaptedDiffeo& phi, int count,
                                        std::uint64_t seed) {
    const FoliatedChart& c = phi.chart;
    const int n = c.n();
    const int p = c.p;
    assert(static_cast<int>(phi.fwd.size()) == n && static_cast<int>(phi.inv.size()) == n);
    ValidationReport rep;
    const auto pts = sample_points(c, count, seed);

    for (int i = p; i < n; ++i)
        for (int d = 0; d < p; ++d) {
            double fmax = 0.0, gmax = 0.0;
            for (const auto& pt : pts) {
                fmax = std::max(fmax, std::fabs(detail::partial_at(phi.fwd[i], pt, d)));
                gmax = std::max(gmax, std::fabs(detail::partial_at(phi.inv[i], pt, d)));
            }
            if (fmax > detail::kValidateTol)
                rep.add("fwd[" + std::to_string(i + 1) + "] depends on x" +
                            std::to_string(d + 1),
                        fmax);
            if (gmax > detail::kValidateTol)
                rep.add("inv[" + std::to_string(i + 1) + "] depends on x" +
                            std::to_string(d + 1),
                        gmax);
        }

    double rmax = 0.0;
    for (const auto& pt : pts) {
        auto jmid = apply_fields(phi.fwd, make_jet_point(pt));
        auto back = apply_fields(phi.inv, jmid);
        for (int i = 0; i < n; ++i)
            rmax = std::max(rmax, std::fabs(back[i].std() - pt[i]));
    }
    if (rmax > detail::kValidateTol) rep.add("inv(fwd(z)) != z on the chart box", rmax);

    return rep;
}

/// Gamma'^i_{kl} = Gamma^i_{kl} + delta^i_k alpha_l + delta^i_l alpha_k.
/// With a foliated alpha this preserves adaptedness; the result is
/// dense-backed.
inline AdaptedConnection projective_shift(const AdaptedConnection& conn,
                                          const OneForm& alpha) {
    const int n = conn.n();
    auto base = std::make_shared<const AdaptedConnection>(conn);
    auto a = std::make_shared<const OneForm>(alpha);
    return AdaptedConnection::dense(
        conn.chart(), [base, a, n](std::span<const Jet> pt) {
            auto g = base->eval_gamma(pt);
            std::vector<Jet> av(n);
            for (int l = 0; l < n; ++l) av[l] = a->comp[l](pt);
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) {
                    g[(i * n + i) * n + l] += av[l];
                    g[(i * n + l) * n + i] += av[l];
                }
            return g;
        });
}

/// Curvature R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
///                       + Gamma^i_{ka} Gamma^a_{lj} - Gamma^i_{la} Gamma^a_{kj},
/// flat layout ((i*n + j)*n + k)*n + l.  Evaluated over jets so the caller can
/// stack further derivatives on top; uses one jet slot internally.
inline std::vector<Jet> curvature(const AdaptedConnection& conn, std::span<const Jet> pt) {
    const int n = conn.n();
    const auto g0 = conn.eval_gamma(pt);
    const int slot = fresh_slot(pt);

    // dg[d][(i*n+k)*n+l] = d_d Gamma^i_{kl}
    std::vector<std::vector<Jet>> dg(n);
    std::vector<Jet> dir(n);
    for (int d = 0; d < n; ++d) {
        for (int i = 0; i < n; ++i) dir[i] = Jet(i == d ? 1.0 : 0.0);
        const auto gd = conn.eval_gamma(lift_point(pt, dir, slot));
        dg[d].resize(g0.size());
        for (std::size_t e = 0; e < g0.size(); ++e) dg[d][e] = gd[e].eps_coeff(slot);
    }

    std::vector<Jet> r(static_cast<std::size_t>(n) * n * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Jet v = dg[k][(i * n + l) * n + j] - dg[l][(i * n + k) * n + j];
                    for (int a = 0; a < n; ++a) {
                        add_assign_mul(v, g0[(i * n + k) * n + a], g0[(a * n + l) * n + j]);
                        sub_assign_mul(v, g0[(i * n + l) * n + a], g0[(a * n + k) * n + j]);
                    }
                    r[(static_cast<std::size_t>(i) * n + j) * n * n + k * n + l] = v;
                }
    return r;
}

inline std::vector<double> curvature_at(const AdaptedConnection& conn,
                                        const std::vector<double>& pt) {
    const auto r = curvature(conn, make_jet_point(pt));
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i].std();
    return out;
}

namespace detail {

/// Jacobian of the map `comps` at pt: J[a*n+b] = d comps[a] / d z_b.
/// Uses one jet slot, one directional lift per column.
inline std::vector<Jet> jacobian(const std::vector<ScalarField>& comps,
                                 std::span<const Jet> pt, int slot) {
    const int n = static_cast<int>(comps.size());
    std::vector<Jet> jac(static_cast<std::size_t>(n) * n);
    std::vector<Jet> dir(pt.size());
    for (int b = 0; b < static_cast<int>(pt.size()); ++b) {
        for (std::size_t i = 0; i < pt.size(); ++i) dir[i] = Jet(static_cast<int>(i) == b ? 1.0 : 0.0);
        const auto lifted = lift_point(pt, dir, slot);
        for (int a = 0; a < n; ++a) jac[a * static_cast<int>(pt.size()) + b] = comps[a](lifted).eps_coeff(slot);
    }
    return jac;
}

}  // namespace detail

/// Transported connection: the unique connection whose geodesics are the
/// phi-images of the input's geodesics.  In coordinates, with z = inv(z'),
///   Gamma'^a_{kl}(z') = K^b_k K^c_l J^a_d Gamma^d_{bc}(z) + H^d_{kl} J^a_d,
/// where J = d fwd/dz at z, K = d inv/dz' at z', and H is the Hessian of inv
/// at z'.  Dense-backed; consumes two jet slots above the incoming width.
inline AdaptedConnection pushforward(const AdaptedConnection& conn,
                                     const AdaptedDiffeo& phi) {
    const int n = conn.n();
    auto base = std::make_shared<const AdaptedConnection>(conn);
    auto map = std::make_shared<const AdaptedDiffeo>(phi);
    return AdaptedConnection::dense(
        conn.chart(), [base, map, n](std::span<const Jet> ptp) {
            const int s = fresh_slot(ptp);
            const auto z = apply_fields(map->inv, ptp);
            const auto gz = base->eval_gamma(z);
            const auto jf = detail::jacobian(map->fwd, z, s);    // J^a_d at z
            const auto ji = detail::jacobian(map->inv, ptp, s);  // K^b_k at z'

            // Hessian of inv at z': h[(d*n+k)*n+l], symmetric in (k, l).
            std::vector<Jet> h(static_cast<std::size_t>(n) * n * n);
            std::vector<Jet> dir(n);
            for (int k = 0; k < n; ++k) {
                for (int i = 0; i < n; ++i) dir[i] = Jet(i == k ? 1.0 : 0.0);
                const auto lk = lift_point(ptp, dir, s);
                for (int l = k; l < n; ++l) {
                    for (int i = 0; i < n; ++i) dir[i] = Jet(i == l ? 1.0 : 0.0);
                    const auto lkl = lift_point(lk, dir, s + 1);
                    for (int d = 0; d < n; ++d) {
                        Jet v = map->inv[d](lkl).eps_coeff(s + 1).eps_coeff(s);
                        h[(d * n + k) * n + l] = v;
                        h[(d * n + l) * n + k] = v;
                    }
                }
            }

            // mid^d_{kl} = K^b_k K^c_l Gamma^d_{bc}(z) + H^d_{kl}
            std::vector<Jet> tmp(static_cast<std::size_t>(n) * n * n);  // K^c_l Gamma^d_{bc}
            for (int d = 0; d < n; ++d)
                for (int b = 0; b < n; ++b)
                    for (int l = 0; l < n; ++l) {
                        Jet v = 0.0;
                        for (int c = 0; c < n; ++c)
                            add_assign_mul(v, ji[c * n + l], gz[(d * n + b) * n + c]);
                        tmp[(d * n + b) * n + l] = v;
                    }
            std::vector<Jet> mid(static_cast<std::size_t>(n) * n * n);
            for (int d = 0; d < n; ++d)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Jet v = h[(d * n + k) * n + l];
                        for (int b = 0; b < n; ++b)
                            add_assign_mul(v, ji[b * n + k], tmp[(d * n + b) * n + l]);
                        mid[(d * n + k) * n + l] = v;
                    }

            std::vector<Jet> out(static_cast<std::size_t>(n) * n * n);
            for (int a = 0; a < n; ++a)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Jet v = 0.0;
                        for (int d = 0; d < n; ++d)
                            add_assign_mul(v, jf[a * n + d], mid[(d * n + k) * n + l]);
                        out[(a * n + k) * n + l] = v;
                    }
            return out;
        });
}

/// Transported symbol: components transform under the forward Jacobian as a
/// contravariant tensor, (phi_* S)(z') = rho(J) S(inv(z')).  Dense-backed;
/// consumes one jet slot above the incoming width.
inline SymbolField pushforward(const SymbolField& sym, const AdaptedDiffeo& phi) {
    auto base = std::make_shared<const SymbolField>(sym);
    auto map = std::make_shared<const AdaptedDiffeo>(phi);
    const int n = sym.chart.n();
    SymbolField out;
    out.chart = sym.chart;
    out.degree = sym.degree;
    out.comp.resize(sym_dim(n, sym.degree));
    out.dense = [base, map, n](std::span<const Jet> ptp) {
        const int s = fresh_slot(ptp);
        const auto z = apply_fields(map->inv, ptp);
        const auto sz = base->eval(z);
        const auto jf = detail::jacobian(map->fwd, z, s);
        Mat<Jet> jm(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) jm(a, b) = jf[a * n + b];
        const auto sp = rho_action(sz, jm);
        std::vector<Jet> flat(sp.size());
        for (int r = 0; r < sp.size(); ++r) flat[r] = sp.comp(r);
        return flat;
    };
    auto dense = out.dense;
    for (int r = 0; r < static_cast<int>(out.comp.size()); ++r)
        out.comp[r] = ScalarField(ScalarField::Fn(
            [dense, r](std::span<const Jet> pt) { return dense(pt)[r]; }));
    return out;
}

/// Transported function: (phi_* f)(z') = f(inv(z')).
inline ScalarField pushforward_function(const ScalarField& f, const AdaptedDiffeo& phi) {
    auto base = std::make_shared<const ScalarField>(f);
    auto map = std::make_shared<const AdaptedDiffeo>(phi);
    return ScalarField(ScalarField::Fn([base, map](std::span<const Jet> ptp) {
        return (*base)(apply_fields(map->inv, ptp));
    }));
}

/// Transported one-form: (phi_* a)_k(z') = K^b_k a_b(inv(z')) with
/// K = d inv/dz' at z'.  Consumes one jet slot above the incoming width.
inline OneForm pushforward(const OneForm& a, const AdaptedDiffeo& phi) {
    auto base = std::make_shared<const OneForm>(a);
    auto map = std::make_shared<const AdaptedDiffeo>(phi);
    const int n = a.chart.n();
    OneForm out;
    out.chart = a.chart;
    out.comp.resize(n);
    for (int k = 0; k < n; ++k)
        out.comp[k] = ScalarField(ScalarField::Fn(
            [base, map, n, k](std::span<const Jet> ptp) {
                const int s = fresh_slot(ptp);
                const auto z = apply_fields(map->inv, ptp);
                const auto ji = detail::jacobian(map->inv, ptp, s);
                Jet v = 0.0;
                for (int b = 0; b < n; ++b)
                    add_assign_mul(v, ji[b * n + k], (*base).comp[b](z));
                return v;
            }));
    return out;
}

/// The transverse connection induced by an adapted connection: the purely
/// transverse Christoffel block, read on the q-dimensional transverse chart.
/// Well defined because that block is leaf-constant for adapted input.
inline FoliatedConnection induce_foliated(const AdaptedConnection& conn) {
    const FoliatedChart tc = conn.chart().transverse_chart();
    const int p = conn.chart().p;
    const int n = conn.chart().n();
    const int q = conn.chart().q;
    auto base = std::make_shared<const AdaptedConnection>(conn);
    const auto xc = conn.chart().center();
    return AdaptedConnection::dense(tc, [base, p, n, q, xc](std::span<const Jet> ypt) {
        std::vector<Jet> full(n);
        for (int i = 0; i < p; ++i) full[i] = Jet(xc[i]);
        for (int i = 0; i < q; ++i) full[p + i] = ypt[i];
        const auto g = base->eval_gamma(full);
        std::vector<Jet> out(static_cast<std::size_t>(q) * q * q);
        for (int i = 0; i < q; ++i)
            for (int k = 0; k < q; ++k)
                for (int l = 0; l < q; ++l)
                    out[(i * q + k) * q + l] =
                        g[((p + i) * n + (p + k)) * static_cast<std::size_t>(n) + (p + l)];
        return out;
    });
}

/// Reads a leaf-constant function on the full chart as a function on the
/// transverse chart (x frozen at the box center).
inline ScalarField reduce_function(const ScalarField& f, const FoliatedChart& chart) {
    auto base = std::make_shared<const ScalarField>(f);
    const int p = chart.p;
    const int q = chart.q;
    const auto xc = chart.center();
    return ScalarField(ScalarField::Fn([base, p, q, xc](std::span<const Jet> ypt) {
        std::vector<Jet> full(p + q);
        for (int i = 0; i < p; ++i) full[i] = Jet(xc[i]);
        for (int i = 0; i < q; ++i) full[p + i] = ypt[i];
        return (*base)(full);
    }));
}

}  // namespace folq
