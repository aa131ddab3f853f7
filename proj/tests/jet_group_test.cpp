// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "folq/jet_group.hpp"
#include "folq/jets.hpp"
#include "folq/rng.hpp"

using namespace folq;

namespace {

// Block-upper-triangular perturbation of the identity: an element of the
// adapted linear group for splitting (p, q).
Mat<double> rand_glnq(Rng& rng, int p, int q) {
    const int n = p + q;
    auto a = Mat<double>::identity(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (i >= p && k < p) continue;
            a(i, k) += rng.uniform(-0.3, 0.3);
        }
    return a;
}

std::vector<double> rand_quad(Rng& rng, int n) {
    std::vector<double> s(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l <= k; ++l) {
                const double v = rng.uniform(-0.5, 0.5);
                s[(i * n + k) * n + l] = v;
                s[(i * n + l) * n + k] = v;
            }
    return s;
}

G2Element<double> rand_g2(Rng& rng, int n) {
    G2Element<double> g{Mat<double>::identity(n), rand_quad(rng, n)};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) g.lin(i, k) += rng.uniform(-0.3, 0.3);
    return g;
}

HElement<double> rand_h(Rng& rng, int p, int q) {
    const int n = p + q;
    HElement<double> h{rand_glnq(rng, p, q), std::vector<double>(n, 0.0)};
    for (int i = p; i < n; ++i) h.alpha[i] = rng.uniform(-0.5, 0.5);
    return h;
}

LieG<double> rand_lie(Rng& rng, int p, int q) {
    const int n = p + q;
    LieG<double> a{p, q, std::vector<double>(n), Mat<double>(n, n), std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) a.v[i] = rng.uniform(-1, 1);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (!(i >= p && k < p)) a.m0(i, k) = rng.uniform(-1, 1);
    for (int i = p; i < n; ++i) a.xi[i] = rng.uniform(-1, 1);
    return a;
}

double lie_dist(const LieG<double>& a, const LieG<double>& b) {
    double m = 0.0;
    for (int i = 0; i < a.n(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
    for (int i = 0; i < a.n(); ++i)
        for (int k = 0; k < a.n(); ++k) m = std::max(m, std::fabs(a.m0(i, k) - b.m0(i, k)));
    for (int i = 0; i < a.n(); ++i) m = std::max(m, std::fabs(a.xi[i] - b.xi[i]));
    return m;
}

// Evaluates the degree-2 polynomial map base + lin z + (1/2) quad(z, z).
std::vector<Jet> eval_package(const std::vector<double>& base, const Mat<double>& lin,
                              const std::vector<double>& quad, const std::vector<Jet>& z) {
    const int n = lin.rows();
    std::vector<Jet> out(n);
    for (int i = 0; i < n; ++i) {
        Jet acc = base.empty() ? Jet(0.0) : Jet(base[i]);
        for (int k = 0; k < n; ++k) acc += lin(i, k) * z[k];
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                acc += (0.5 * quad[(i * n + k) * n + l]) * (z[k] * z[l]);
        out[i] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("acting by the identity leaves a frame unchanged", "[jetgroup]") {
    Rng rng(11);
    const int n = 3;
    Jet2Frame<double> u{{0.2, -0.1, 0.4}, rand_glnq(rng, 1, 2), rand_quad(rng, n)};
    auto v = act(u, g2_identity<double>(n));
    for (int i = 0; i < n; ++i) CHECK(v.base[i] == u.base[i]);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) CHECK(v.lin(i, k) == u.lin(i, k));
    for (std::size_t e = 0; e < u.quad.size(); ++e) CHECK(v.quad[e] == u.quad[e]);
}

TEST_CASE("acting on a centered identity frame installs the group element", "[jetgroup]") {
    Rng rng(12);
    const int n = 3;
    Jet2Frame<double> u{{1.0, 2.0, 3.0}, Mat<double>::identity(n),
                        std::vector<double>(27, 0.0)};
    auto g = rand_g2(rng, n);
    auto v = act(u, g);
    for (int i = 0; i < n; ++i) CHECK(v.base[i] == u.base[i]);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) CHECK(v.lin(i, k) == Catch::Approx(g.lin(i, k)));
    for (std::size_t e = 0; e < g.quad.size(); ++e)
        CHECK(v.quad[e] == Catch::Approx(g.quad[e]).margin(1e-14));
}

TEST_CASE("act is a right action and matches jet composition", "[jetgroup]") {
    Rng rng(13);
    const int n = 3;
    for (int rep = 0; rep < 25; ++rep) {
        Jet2Frame<double> u{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                            rand_g2(rng, n).lin, rand_quad(rng, n)};
        auto g = rand_g2(rng, n);
        auto h = rand_g2(rng, n);

        auto lhs = act(act(u, g), h);
        auto rhs = act(u, g2_mul(g, h));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                CHECK(lhs.lin(i, k) == Catch::Approx(rhs.lin(i, k)).margin(1e-12));
        for (std::size_t e = 0; e < lhs.quad.size(); ++e)
            CHECK(lhs.quad[e] == Catch::Approx(rhs.quad[e]).margin(1e-12));

        // Independent oracle: the frame package is the 2-jet of the polynomial
        // map z -> base + lin z + quad(z,z)/2, and act must be jet composition.
        std::vector<Jet> z(n);
        std::vector<double> w1(n), w2(n);
        for (int i = 0; i < n; ++i) {
            w1[i] = rng.uniform(-1, 1);
            w2[i] = rng.uniform(-1, 1);
            z[i] = Jet::lifted(Jet::lifted(Jet(0.0), 0, Jet(w1[i])), 1, Jet(w2[i]));
        }
        auto inner = eval_package({}, g.lin, g.quad, z);
        auto composed = eval_package(u.base, u.lin, u.quad, inner);
        auto ug = act(u, g);
        auto direct = eval_package(ug.base, ug.lin, ug.quad, z);
        for (int i = 0; i < n; ++i) {
            CHECK(composed[i].std() == Catch::Approx(direct[i].std()).margin(1e-12));
            CHECK(composed[i].coeff(1) == Catch::Approx(direct[i].coeff(1)).margin(1e-12));
            CHECK(composed[i].coeff(2) == Catch::Approx(direct[i].coeff(2)).margin(1e-12));
            CHECK(composed[i].coeff(3) == Catch::Approx(direct[i].coeff(3)).margin(1e-12));
        }
    }
}

TEST_CASE("group elements invert", "[jetgroup]") {
    Rng rng(14);
    const int n = 4;
    auto g = rand_g2(rng, n);
    auto e = g2_mul(g, g2_inverse(g));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            CHECK(e.lin(i, k) == Catch::Approx(i == k ? 1.0 : 0.0).margin(1e-12));
    for (std::size_t e2 = 0; e2 < e.quad.size(); ++e2)
        CHECK(e.quad[e2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("isotropy inclusion hits the quoted quadratic part", "[jetgroup]") {
    const int p = 1, q = 2, n = p + q;
    HElement<double> h{Mat<double>::identity(n), {0.0, 1.0, 0.0}};  // alpha = first transverse covector
    auto g = include_H(h);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                const double expect = -((i == k && l == p) ? 1.0 : 0.0) -
                                      ((i == l && k == p) ? 1.0 : 0.0);
                CHECK(g.quad[(i * n + k) * n + l] == Catch::Approx(expect).margin(1e-15));
            }
    CHECK(g.quad[(p * n + p) * n + p] == -2.0);
    CHECK(include_H(h_identity<double>(n)).quad[0] == 0.0);
}

TEST_CASE("isotropy inclusion is a homomorphism with foliated image", "[jetgroup]") {
    Rng rng(15);
    const int p = 1, q = 2, n = p + q;
    for (int rep = 0; rep < 20; ++rep) {
        auto h1 = rand_h(rng, p, q);
        auto h2 = rand_h(rng, p, q);
        auto lhs = include_H(h_mul(h1, h2));
        auto rhs = g2_mul(include_H(h1), include_H(h2));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                CHECK(lhs.lin(i, k) == Catch::Approx(rhs.lin(i, k)).margin(1e-12));
        for (std::size_t e = 0; e < lhs.quad.size(); ++e)
            CHECK(lhs.quad[e] == Catch::Approx(rhs.quad[e]).margin(1e-12));

        // Foliation preservation: transverse rows see transverse columns only.
        for (int i = p; i < n; ++i) {
            for (int k = 0; k < p; ++k) CHECK(lhs.lin(i, k) == 0.0);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    if (k < p || l < p) CHECK(lhs.quad[(i * n + k) * n + l] == 0.0);
        }
    }
}

TEST_CASE("transverse block projection is a homomorphism", "[jetgroup]") {
    Rng rng(16);
    const int p = 2, q = 2, n = p + q;

    auto id = project_group(h_identity<double>(n), p);
    for (int i = 0; i < q; ++i)
        for (int k = 0; k < q; ++k) CHECK(id.a(i, k) == (i == k ? 1.0 : 0.0));
    for (int i = 0; i < q; ++i) CHECK(id.alpha[i] == 0.0);

    HElement<double> two{Mat<double>::identity(n), std::vector<double>(n, 0.0)};
    two.a(p, p) = 2.0;
    two.a(p + 1, p + 1) = 2.0;
    auto pr = project_group(two, p);
    CHECK(pr.a(0, 0) == 2.0);
    CHECK(pr.a(1, 1) == 2.0);
    CHECK(pr.a(0, 1) == 0.0);

    for (int rep = 0; rep < 20; ++rep) {
        auto h1 = rand_h(rng, p, q);
        auto h2 = rand_h(rng, p, q);
        auto lhs = project_group(h_mul(h1, h2), p);
        auto rhs = h_mul(project_group(h1, p), project_group(h2, p));
        for (int i = 0; i < q; ++i)
            for (int k = 0; k < q; ++k)
                CHECK(lhs.a(i, k) == Catch::Approx(rhs.a(i, k)).margin(1e-12));
        for (int i = 0; i < q; ++i)
            CHECK(lhs.alpha[i] == Catch::Approx(rhs.alpha[i]).margin(1e-12));
    }
}

TEST_CASE("bracket respects the grading", "[jetgroup]") {
    Rng rng(17);
    const int p = 1, q = 2, n = p + q;

    LieG<double> x{p, q, {1, 2, 3}, Mat<double>(n, n), std::vector<double>(n, 0.0)};
    LieG<double> y{p, q, {-1, 0, 2}, Mat<double>(n, n), std::vector<double>(n, 0.0)};
    auto xy = bracket(x, y);
    CHECK(lie_dist(xy, lie_zero<double>(p, q)) == 0.0);  // grade -1 is abelian

    auto a = rand_lie(rng, p, q);
    LieG<double> m{p, q, std::vector<double>(n, 0.0), a.m0, std::vector<double>(n, 0.0)};
    auto mx = bracket(m, x);
    for (int i = 0; i < n; ++i) CHECK(mx.xi[i] == 0.0);  // [g0, g-1] in g-1
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) CHECK(mx.m0(i, k) == 0.0);
    for (int i = 0; i < n; ++i) {
        double expect = 0.0;
        for (int k = 0; k < n; ++k) expect += m.m0(i, k) * x.v[k];
        CHECK(mx.v[i] == Catch::Approx(expect).margin(1e-14));
    }

    LieG<double> k1{p, q, std::vector<double>(n, 0.0), Mat<double>(n, n), {0.0, 0.7, -0.4}};
    LieG<double> k2{p, q, std::vector<double>(n, 0.0), Mat<double>(n, n), {0.0, 0.3, 0.9}};
    CHECK(lie_dist(bracket(k1, k2), lie_zero<double>(p, q)) == 0.0);  // grade 1 is abelian
}

TEST_CASE("bracket of grade 1 with grade -1 has the divergence sign pattern", "[jetgroup]") {
    const int p = 1, q = 2, n = p + q;
    LieG<double> h{p, q, std::vector<double>(n, 0.0), Mat<double>(n, n), {0.0, 0.5, -0.2}};
    LieG<double> x{p, q, {1.0, 2.0, -1.0}, Mat<double>(n, n), std::vector<double>(n, 0.0)};
    auto hx = bracket(h, x);
    // [h, X] = -(X (x) h + <h, X> id) as a grade-0 endomorphism.
    double pairing = 0.0;
    for (int i = 0; i < n; ++i) pairing += h.xi[i] * x.v[i];
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double expect = -(x.v[i] * h.xi[k] + (i == k ? pairing : 0.0));
            CHECK(hx.m0(i, k) == Catch::Approx(expect).margin(1e-14));
        }
    for (int i = 0; i < n; ++i) {
        CHECK(hx.v[i] == 0.0);
        CHECK(hx.xi[i] == 0.0);
    }
}

TEST_CASE("bracket satisfies Jacobi and flags subalgebra escapes", "[jetgroup]") {
    Rng rng(18);
    const int p = 1, q = 2;
    for (int rep = 0; rep < 10; ++rep) {
        auto a = rand_lie(rng, p, q);
        auto b = rand_lie(rng, p, q);
        auto c = rand_lie(rng, p, q);
        auto jac = bracket(bracket(a, b), c);
        auto j2 = bracket(bracket(b, c), a);
        auto j3 = bracket(bracket(c, a), b);
        LieG<double> sum = jac;
        for (int i = 0; i < sum.n(); ++i) sum.v[i] += j2.v[i] + j3.v[i];
        for (int i = 0; i < sum.n(); ++i)
            for (int k = 0; k < sum.n(); ++k) sum.m0(i, k) += j2.m0(i, k) + j3.m0(i, k);
        for (int i = 0; i < sum.n(); ++i) sum.xi[i] += j2.xi[i] + j3.xi[i];
        CHECK(lie_dist(sum, lie_zero<double>(p, q)) < 1e-12);
    }

    // A tangentially supported grade-1 covector is outside the algebra; the
    // bracket with a generic translation lands outside gl(n,q) and must throw.
    LieG<double> bad{p, q, std::vector<double>(3, 0.0), Mat<double>(3, 3), {0.8, 0.0, 0.0}};
    LieG<double> x{p, q, {0.0, 1.0, 0.0}, Mat<double>(3, 3), std::vector<double>(3, 0.0)};
    CHECK_THROWS_AS(bracket(bad, x), AlgebraError);
}

TEST_CASE("adjoint action is by conjugation and linearizes to the bracket", "[jetgroup]") {
    Rng rng(19);
    const int p = 1, q = 2, n = p + q;
    auto a = rand_lie(rng, p, q);
    auto b = rand_lie(rng, p, q);

    auto e = adjoint(h_identity<double>(n), a);
    CHECK(lie_dist(e, a) < 1e-15);

    auto h = rand_h(rng, p, q);
    auto lhs = adjoint(h, bracket(a, b));
    auto rhs = bracket(adjoint(h, a), adjoint(h, b));
    CHECK(lie_dist(lhs, rhs) < 1e-10);

    // Ad(exp(t xi)) a = a + t [k, a] + t^2/2 [k, [k, a]] exactly (nilpotency).
    std::vector<double> xi{0.0, 0.4, -0.7};
    LieG<double> k{p, q, std::vector<double>(n, 0.0), Mat<double>(n, n), xi};
    const double t = 0.37;
    auto ka = bracket(k, a);
    auto kka = bracket(k, ka);
    auto ad = adjoint(exp_H(xi, t), a);
    LieG<double> expect = a;
    for (int i = 0; i < n; ++i) expect.v[i] += t * ka.v[i] + 0.5 * t * t * kka.v[i];
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < n; ++c)
            expect.m0(i, c) += t * ka.m0(i, c) + 0.5 * t * t * kka.m0(i, c);
    for (int i = 0; i < n; ++i) expect.xi[i] += t * ka.xi[i] + 0.5 * t * t * kka.xi[i];
    CHECK(lie_dist(ad, expect) < 1e-12);
}

TEST_CASE("grade-1 exponentials form a one-parameter group", "[jetgroup]") {
    const int n = 3;
    std::vector<double> xi{0.0, 0.25, -0.5};
    auto e0 = exp_H(xi, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) CHECK(e0.a(i, k) == (i == k ? 1.0 : 0.0));
    for (int i = 0; i < n; ++i) CHECK(e0.alpha[i] == 0.0);

    auto lhs = h_mul(exp_H(xi, 0.3), exp_H(xi, 0.5));
    auto rhs = exp_H(xi, 0.8);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            CHECK(lhs.a(i, k) == Catch::Approx(rhs.a(i, k)).margin(1e-15));
    for (int i = 0; i < n; ++i)
        CHECK(lhs.alpha[i] == Catch::Approx(rhs.alpha[i]).margin(1e-15));

    // The generator is nilpotent of order two.
    LieG<double> k{1, 2, std::vector<double>(n, 0.0), Mat<double>(n, n), xi};
    auto m = lie_to_matrix(k);
    auto mm = m * m;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) CHECK(mm(i, j) == 0.0);
}
