// SPDX-License-Identifier: MIT
#pragma once

// Deterministic random instances (connections, symbols, diffeomorphisms,
// group elements) for property checks.  Everything is driven by the seeded
// Rng so reports are reproducible byte for byte.

#include <utility>
#include <vector>

#include "folq/chart.hpp"
#include "folq/jet_group.hpp"
#include "folq/multi_index.hpp"
#include "folq/rng.hpp"

namespace folq {

/// Random polynomial in the given coordinate slots, all monomials up to
/// `degree`, coefficients uniform in [-scale, scale].
inline ScalarField random_poly_field(Rng& rng, const std::vector<int>& slots, int degree,
                                     double scale) {
    struct Term {
        double c;
        std::vector<std::pair<int, int>> pows;  // (slot, exponent)
    };
    std::vector<Term> terms;
    const int w = static_cast<int>(slots.size());
    for (int d = 0; d <= degree; ++d)
        for (const auto& g : multi_indices(w, d)) {
            Term t;
            t.c = rng.uniform(-scale, scale);
            for (int i = 0; i < w; ++i)
                if (g[i] > 0) t.pows.emplace_back(slots[i], g[i]);
            terms.push_back(std::move(t));
        }
    return ScalarField(ScalarField::Fn([terms](std::span<const Jet> pt) {
        Jet acc = 0.0;
        for (const auto& t : terms) {
            Jet m(t.c);
            for (const auto& [s, e] : t.pows) m = m * pow(pt[s], e);
            acc += m;
        }
        return acc;
    }));
}

inline std::vector<int> tangential_slots(const FoliatedChart& c) {
    std::vector<int> s(c.p);
    for (int i = 0; i < c.p; ++i) s[i] = i;
    return s;
}

inline std::vector<int> transverse_slots(const FoliatedChart& c) {
    std::vector<int> s(c.q);
    for (int i = 0; i < c.q; ++i) s[i] = c.p + i;
    return s;
}

inline std::vector<int> all_slots(const FoliatedChart& c) {
    std::vector<int> s(c.n());
    for (int i = 0; i < c.n(); ++i) s[i] = i;
    return s;
}

/// Random adapted connection: the purely transverse block is a leaf-constant
/// quadratic polynomial, entries with a tangential upper index are free
/// quadratics in all coordinates, and the forbidden entries (transverse upper
/// index with a tangential lower index) stay zero.
inline AdaptedConnection random_adapted_connection(const FoliatedChart& chart, Rng& rng,
                                                   double scale = 0.3) {
    const int n = chart.n();
    const int p = chart.p;
    AdaptedConnection conn(chart);
    const auto yslots = transverse_slots(chart);
    const auto zslots = all_slots(chart);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l <= k; ++l) {
                if (i >= p && !(k >= p && l >= p)) continue;  // forbidden block
                const auto& slots = i >= p ? yslots : zslots;
                conn.set_gamma(i, k, l, random_poly_field(rng, slots, 2, scale));
            }
    return conn;
}

/// Random symbol of a transverse differential operator: components supported
/// on transverse multi-indices, with leaf-constant polynomial coefficients.
inline SymbolField random_foliated_symbol(const FoliatedChart& chart, int degree, Rng& rng,
                                          double scale = 1.0) {
    const int n = chart.n();
    SymbolField s;
    s.chart = chart;
    s.degree = degree;
    s.comp.resize(sym_dim(n, degree));
    const auto yslots = transverse_slots(chart);
    const auto gs = multi_indices(n, degree);
    for (int r = 0; r < static_cast<int>(gs.size()); ++r) {
        bool transverse = true;
        for (int i = 0; i < chart.p; ++i)
            if (gs[r][i] > 0) transverse = false;
        if (transverse) s.comp[r] = random_poly_field(rng, yslots, 2, scale);
    }
    return s;
}

/// Random leaf-constant function (cubic polynomial in y).
inline ScalarField random_leaf_function(const FoliatedChart& chart, Rng& rng,
                                        double scale = 1.0) {
    return random_poly_field(rng, transverse_slots(chart), 3, scale);
}

/// Random foliated one-form: tangential components zero, transverse ones
/// leaf-constant quadratics.
inline OneForm random_foliated_oneform(const FoliatedChart& chart, Rng& rng,
                                       double scale = 0.3) {
    OneForm a{chart, std::vector<ScalarField>(chart.n())};
    for (int i = chart.p; i < chart.n(); ++i)
        a.comp[i] = random_poly_field(rng, transverse_slots(chart), 2, scale);
    return a;
}

/// Random adapted isotropy element: block-upper-triangular perturbation of
/// the identity plus a transverse covector.
inline HElement<double> random_adapted_h(Rng& rng, int p, int q, double scale = 0.3) {
    const int n = p + q;
    HElement<double> h{Mat<double>::identity(n), std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (i >= p && k < p) continue;
            h.a(i, k) += rng.uniform(-scale, scale);
        }
    for (int i = p; i < n; ++i) h.alpha[i] = rng.uniform(-scale, scale);
    return h;
}

/// Random foliation-respecting diffeomorphism with an exact closed-form
/// inverse: the transverse block is a unipotent triangular polynomial map,
/// the tangential block a y-dependent rescale plus shear,
///   y'_1 = y_1 + c_1,   y'_i = y_i + c_i y_{i-1}^2   (i >= 2),
///   x'_a = x_a (1 + t_a y_1) + s_a y_2^2,
/// inverted slot by slot in the same triangular order.
inline AdaptedDiffeo random_adapted_diffeo(const FoliatedChart& chart, Rng& rng,
                                           double strength = 0.3) {
    const int p = chart.p;
    const int q = chart.q;
    std::vector<double> c(q), t(p), s(p);
    for (int i = 0; i < q; ++i) c[i] = rng.uniform(-strength, strength);
    for (int a = 0; a < p; ++a) {
        t[a] = rng.uniform(-strength, strength);
        s[a] = rng.uniform(-strength, strength);
    }

    AdaptedDiffeo phi{chart, std::vector<ScalarField>(p + q), std::vector<ScalarField>(p + q)};

    std::vector<ScalarField> yinv(q);  // y_i as a function of the primed point
    for (int i = 0; i < q; ++i) {
        const double ci = c[i];
        phi.fwd[p + i] = ScalarField(ScalarField::Fn([p, i, ci](std::span<const Jet> z) {
            return i == 0 ? z[p] + Jet(ci) : z[p + i] + ci * (z[p + i - 1] * z[p + i - 1]);
        }));
        if (i == 0) {
            yinv[0] = ScalarField(ScalarField::Fn(
                [p, ci](std::span<const Jet> z) { return z[p] - Jet(ci); }));
        } else {
            ScalarField prev = yinv[i - 1];
            yinv[i] = ScalarField(ScalarField::Fn([p, i, ci, prev](std::span<const Jet> z) {
                const Jet w = prev(z);
                return z[p + i] - ci * (w * w);
            }));
        }
        phi.inv[p + i] = yinv[i];
    }
    for (int a = 0; a < p; ++a) {
        const double ta = t[a], sa = s[a];
        phi.fwd[a] = ScalarField(ScalarField::Fn([a, p, ta, sa](std::span<const Jet> z) {
            return z[a] * (Jet(1.0) + ta * z[p]) + sa * (z[p + 1] * z[p + 1]);
        }));
        ScalarField y1 = yinv[0], y2 = yinv[1];
        phi.inv[a] = ScalarField(ScalarField::Fn([a, ta, sa, y1, y2](std::span<const Jet> z) {
            const Jet w2 = y2(z);
            return (z[a] - sa * (w2 * w2)) / (Jet(1.0) + ta * y1(z));
        }));
    }
    return phi;
}

}  // namespace folq
