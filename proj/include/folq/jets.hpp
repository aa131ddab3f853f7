// SPDX-License-Identifier: MIT
//
// Truncated multivariate jets: the ring R[e0..e5] / (e_i^2 = 0).
//
// A jet stores one coefficient per subset of the active slots, indexed by
// bitmask, so a width-w jet has 2^w coefficients and multiplication is a
// convolution over disjoint subset pairs (cost 3^w).  Each nesting level of a
// Lie/directional derivative consumes one slot: seed the point with a fresh
// slot, push it through the computation, read the coefficient back off.
// Slots are used stack-like; six levels cover the deepest pipeline here
// (four derivative nestings + a diffeomorphism Hessian or curvature partial).

#pragma once

#include <folq/errors.hpp>
#include <folq/linalg.hpp>

#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace folq {

class Jet {
  public:
    static constexpr int kMaxSlots = 6;
    static constexpr int kCap = 1 << kMaxSlots;

    Jet() = default;
    Jet(double v) { c_[0] = v; }  // NOLINT: implicit by design, scalars embed

    /// v + e_slot.
    static Jet seeded(double v, int slot) {
        assert(slot >= 0 && slot < kMaxSlots);
        Jet j(v);
        j.c_[1u << slot] = 1.0;
        j.w_ = slot + 1;
        return j;
    }

    /// v + e_slot * dv; both operands must live below the new slot.
    static Jet lifted(const Jet& v, int slot, const Jet& dv) {
        assert(slot >= 0 && slot < kMaxSlots);
        assert(v.w_ <= slot && dv.w_ <= slot);
        Jet j = v;
        const unsigned bit = 1u << slot;
        for (unsigned m = 0; m < (1u << dv.w_); ++m) j.c_[m | bit] = dv.c_[m];
        j.w_ = slot + 1;
        return j;
    }

    int width() const { return w_; }
    double std() const { return c_[0]; }
    double coeff(unsigned mask) const { return mask < kCap ? c_[mask] : 0.0; }

    /// Coefficient of e_slot, truncated to the slots below it.  Extraction is
    /// meant to pop the top slot; lower slots lose their cross terms.
    Jet eps_coeff(int slot) const {
        Jet r;
        if (slot >= w_) { r.w_ = w_; return r; }
        const unsigned bit = 1u << slot;
        for (unsigned m = 0; m < bit; ++m) r.c_[m] = c_[m | bit];
        r.w_ = slot;
        return r;
    }

    /// Discard e_slot and everything above it (the value part of a lift).
    Jet truncated(int slot) const {
        Jet r;
        const int w = slot < w_ ? slot : w_;
        for (unsigned m = 0; m < (1u << w); ++m) r.c_[m] = c_[m];
        r.w_ = w;
        return r;
    }

    Jet& operator+=(const Jet& o) {
        if (o.w_ > w_) w_ = o.w_;
        for (unsigned m = 0; m < (1u << o.w_); ++m) c_[m] += o.c_[m];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        if (o.w_ > w_) w_ = o.w_;
        for (unsigned m = 0; m < (1u << o.w_); ++m) c_[m] -= o.c_[m];
        return *this;
    }
    Jet& operator*=(double s) {
        for (unsigned m = 0; m < (1u << w_); ++m) c_[m] *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator-(const Jet& a) {
        Jet r;
        r.w_ = a.w_;
        for (unsigned m = 0; m < (1u << a.w_); ++m) r.c_[m] = -a.c_[m];
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.w_ = a.w_ > b.w_ ? a.w_ : b.w_;
        mul_acc(r, a, b, +1.0);
        return r;
    }

    /// x += a*b and x -= a*b without temporaries; the elimination kernels and
    /// matrix products run on these.
    friend void add_assign_mul(Jet& x, const Jet& a, const Jet& b) {
        const int w = a.w_ > b.w_ ? a.w_ : b.w_;
        if (w > x.w_) x.w_ = w;
        mul_acc(x, a, b, +1.0);
    }
    friend void sub_assign_mul(Jet& x, const Jet& a, const Jet& b) {
        const int w = a.w_ > b.w_ ? a.w_ : b.w_;
        if (w > x.w_) x.w_ = w;
        mul_acc(x, a, b, -1.0);
    }

    friend Jet operator/(const Jet& b, const Jet& a) {
        if (a.c_[0] == 0.0) throw EvalError("jet division by zero standard part");
        Jet r;
        r.w_ = a.w_ > b.w_ ? a.w_ : b.w_;
        const double inv0 = 1.0 / a.c_[0];
        // Solve r*a = b by peeling masks: every proper submask of m precedes
        // m numerically, so one forward sweep suffices.
        for (unsigned m = 0; m < (1u << r.w_); ++m) {
            double acc = b.c_[m];
            for (unsigned s = (m - 1) & m; s != m; s = (s - 1) & m) {
                acc -= r.c_[s] * a.c_[m ^ s];
                if (s == 0) break;
            }
            r.c_[m] = acc * inv0;
        }
        return r;
    }

    friend Jet sin(const Jet& a) {
        const double s = std::sin(a.c_[0]), c = std::cos(a.c_[0]);
        const double d[4] = {s, c, -s, -c};
        return taylor(a, d);
    }
    friend Jet cos(const Jet& a) {
        const double s = std::sin(a.c_[0]), c = std::cos(a.c_[0]);
        const double d[4] = {c, -s, -c, s};
        return taylor(a, d);
    }
    friend Jet exp(const Jet& a) {
        const double e = std::exp(a.c_[0]);
        const double d[4] = {e, e, e, e};
        return taylor(a, d);
    }

    friend Jet pow(const Jet& a, int k) {
        if (k < 0) return Jet(1.0) / pow(a, -k);
        Jet acc(1.0), base = a;
        while (k > 0) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    friend double std_part(const Jet& a) { return a.c_[0]; }

  private:
    // r += sign * a*b over all disjoint-subset coefficient pairs; for each
    // a-mask only the submasks of its complement contribute (e_k^2 = 0),
    // giving the 3^w subset-convolution cost.
    static void mul_acc(Jet& r, const Jet& a, const Jet& b, double sign) {
        const unsigned na = 1u << a.w_, nb = 1u << b.w_;
        for (unsigned i = 0; i < na; ++i) {
            const double ai = sign * a.c_[i];
            if (ai == 0.0) continue;
            const unsigned free = (nb - 1) & ~i;
            for (unsigned j = free;; j = (j - 1) & free) {
                r.c_[i | j] += ai * b.c_[j];
                if (j == 0) break;
            }
        }
    }

    // f(a0 + n) = sum_j f^(j)(a0)/j! n^j with n nilpotent; derivatives of the
    // library functions cycle with period <= 4, evaluated by Horner.
    static Jet taylor(const Jet& a, const double deriv_cycle[4]) {
        Jet n = a;
        n.c_[0] = 0.0;
        const int w = a.w_;
        double fact = 1.0;
        for (int j = 2; j <= w; ++j) fact *= j;
        Jet acc(deriv_cycle[w & 3] / fact);
        for (int j = w - 1; j >= 0; --j) {
            fact = 1.0;
            for (int i = 2; i <= j; ++i) fact *= i;
            Jet next = acc * n;
            next += Jet(deriv_cycle[j & 3] / fact);
            acc = next;
        }
        return acc;
    }

    std::array<double, kCap> c_{};
    int w_ = 0;
};

inline Jet operator*(double s, const Jet& a) { Jet r = a; r *= s; return r; }
inline Jet operator*(const Jet& a, double s) { Jet r = a; r *= s; return r; }

/// Width-0 embedding of a real point.
inline std::vector<Jet> make_jet_point(std::span<const double> pt) {
    std::vector<Jet> r(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) r[i] = Jet(pt[i]);
    return r;
}

/// A vector field evaluated at (possibly jet-valued) points.
using JetField = std::function<std::vector<Jet>(std::span<const Jet>)>;

/// First slot not used by any component of a point.
inline int fresh_slot(std::span<const Jet> u) {
    int w = 0;
    for (const Jet& j : u) w = j.width() > w ? j.width() : w;
    return w;
}

/// Lift a point one slot along a tangent vector: u + e_slot * v.
inline std::vector<Jet> lift_point(std::span<const Jet> u, std::span<const Jet> v, int slot) {
    assert(u.size() == v.size());
    std::vector<Jet> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = Jet::lifted(u[i], slot, v[i]);
    return r;
}

/// Lie derivative of a scalar-valued function along a vector field.
template <class F>
Jet lie_derive(F&& func, std::span<const Jet> u, const JetField& field) {
    const int slot = fresh_slot(u);
    const std::vector<Jet> v = field(u);
    const std::vector<Jet> lifted = lift_point(u, v, slot);
    return func(std::span<const Jet>(lifted)).eps_coeff(slot);
}

/// Nested directional derivatives: fields[0] is applied outermost.
template <class F>
Jet nested_derivative(F&& func, std::span<const double> point,
                      std::span<const JetField> fields) {
    std::vector<Jet> u = make_jet_point(point);
    std::function<Jet(std::span<const Jet>)> eval = [&](std::span<const Jet> pt) {
        return func(pt);
    };
    // Build the chain from the innermost derivative outward.
    for (std::size_t i = fields.size(); i-- > 0;) {
        auto inner = eval;
        const JetField& fld = fields[i];
        eval = [inner, &fld](std::span<const Jet> pt) {
            return lie_derive(inner, pt, fld);
        };
    }
    return eval(u);
}

template <class F>
Jet nested_derivative(F&& func, const std::vector<double>& point,
                      const std::vector<JetField>& fields) {
    return nested_derivative(std::forward<F>(func), std::span<const double>(point),
                             std::span<const JetField>(fields));
}

}  // namespace folq
