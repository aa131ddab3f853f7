// Acceptance gate for the foliated quantization library.
//
// Runs the numerical property suites over the full grid of chart shapes
//     (p, q) in {0, 1, 2} x {2, 3}
// with five seeded random polynomial adapted connections per shape, and
// prints exactly one PASS/FAIL line per criterion.  Exit status is zero iff
// every criterion holds.  Tolerances are pinned in code next to each
// criterion; sample sizes are chosen so the whole run stays well under ten
// minutes while every identity is exercised at 20+ bundle points per shape.

#include "folq/checks.hpp"
#include "folq/generators.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace {

using folq::CheckReport;
using folq::CheckSpec;

constexpr std::uint64_t kSeed = 20260814;

struct Cell {
    int p, q;
};
constexpr Cell kCells[] = {{0, 2}, {1, 2}, {2, 2}, {0, 3}, {1, 3}, {2, 3}};

// Aggregates suite reports for one criterion: pass iff all pass, and keep the
// single worst residual with its provenance string for diagnostics.
struct Outcome {
    bool pass = true;
    double worst = 0.0;
    std::string where;

    void fold(const CheckReport& r) {
        if (!r.pass) pass = false;
        if (where.empty() || r.worst > worst) {
            worst = std::max(worst, r.worst);
            where = r.name + ": " + r.worst_case;
        }
    }
};

CheckSpec make_spec(const char* name, const Cell& c, int k, int conns, int points,
                    double tol, std::uint64_t salt) {
    CheckSpec s;
    s.name = name;
    s.p = c.p;
    s.q = c.q;
    s.k = k;
    s.connections = conns;
    s.points = points;
    s.seed = kSeed + salt;
    s.tolerance = tol;
    return s;
}

void run_over_grid(Outcome& o, const char* name, int k, int conns, int points,
                   double tol, std::uint64_t salt) {
    for (std::size_t ci = 0; ci < std::size(kCells); ++ci)
        o.fold(folq::run_suite(
            make_spec(name, kCells[ci], k, conns, points, tol, salt + 9176 * ci)));
}

template <class F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool report(int id, const char* label, const Outcome& o, const char* tol,
            double secs) {
    std::printf("%s  %2d. %-42s worst %9.3e  (tol %s, %.1fs)\n",
                o.pass ? "PASS" : "FAIL", id, label, o.worst, tol, secs);
    if (!o.pass) std::printf("        worst case: %s\n", o.where.c_str());
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main() {
    std::printf(
        "acceptance grid: (p,q) in {0,1,2} x {2,3}, "
        "5 random polynomial connections per shape, seed %llu\n",
        static_cast<unsigned long long>(kSeed));
    std::fflush(stdout);

    bool all = true;
    double total = 0.0;

    {  // 1. Curvature of the constructed connection: flatness transport
       //    identity at random frames, cyclic curvature symmetry, vanishing
       //    torsion and transverse traces, all below 1e-9 at every sampled
       //    bundle point.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "structure-equation", 2, 5, 20, 1e-9, 101);
            run_over_grid(o, "bianchi", 2, 5, 20, 1e-9, 102);
            run_over_grid(o, "normality", 2, 5, 20, 1e-9, 103);
        });
        total += s;
        all &= report(1, "curvature structure, symmetry, traces", o, "1e-9", s);
    }

    {  // 2. First-order response of the trace block to a deformation-row
       //    shift matches the closed linear formula to 1e-6 relative.
        Outcome o;
        const double s = timed(
            [&] { run_over_grid(o, "equ2-linear-response", 2, 5, 20, 1e-6, 201); });
        total += s;
        all &= report(2, "trace response to deformation shifts", o, "1e-6", s);
    }

    {  // 3. Frame transport of the flat model agrees with the algebra action
       //    on 50 random (point, direction) pairs per connection, below 1e-9.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "link", 2, 5, 10, 1e-9, 301);  // points*5 = 50 pairs
        });
        total += s;
        all &= report(3, "flat-model transport matches algebra", o, "1e-9", s);
    }

    {  // 4. Covariant-derivative identities: distribution compatibility,
       //    projected invariance, both divergence recursions (contraction
       //    order up to 3), and the degree-lowering gradient identity up to
       //    k = 4, with the lift-invariance characterization of symbols; all
       //    below 1e-8 at 20 bundle points per shape (4 per connection).
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "gonabla", 3, 5, 4, 1e-8, 401);
            run_over_grid(o, "goinv", 3, 5, 4, 1e-8, 402);
            run_over_grid(o, "div1", 3, 5, 4, 1e-8, 403);
            run_over_grid(o, "div2", 3, 5, 4, 1e-8, 404);
            run_over_grid(o, "nablag1", 4, 5, 4, 1e-8, 405);
            run_over_grid(o, "invalg", 3, 5, 4, 1e-8, 406);
        });
        total += s;
        all &= report(4, "covariant derivative + divergence identities", o,
                      "1e-8", s);
    }

    {  // 5. Operator semantics: extracted top-order coefficients reproduce
       //    the symbol to 1e-8; degree 0 acts by exact multiplication
       //    (1e-12); degree 1 matches a directional-derivative finite
       //    difference to 1e-5.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "principal-symbol", 3, 5, 2, 1e-8, 501);
            run_over_grid(o, "k0-multiplication", 0, 5, 20, 1e-12, 502);
            run_over_grid(o, "k1-derivation", 1, 5, 20, 1e-5, 503);
        });
        total += s;
        all &= report(5, "principal symbol, k=0/k=1 semantics", o,
                      "1e-8 / 1e-12 / 1e-5", s);
    }

    {  // 6. The quantized value is unchanged when the connection moves within
       //    its projective class along five random foliated one-forms per
       //    connection, below 1e-7 relative.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "projective-invariance", 3, 5, 2, 1e-7, 601);
        });
        total += s;
        all &= report(6, "projective class invariance (5 shifts)", o, "1e-7", s);
    }

    {  // 7. Quantize-then-restrict equals restrict-then-quantize, and the
       //    output of the foliated pipeline is leaf-constant, below 1e-8.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "commutation", 3, 5, 4, 1e-8, 701);
            run_over_grid(o, "foliatedness-of-output", 3, 5, 4, 1e-8, 702);
        });
        total += s;
        all &= report(7, "reduction commutation + leaf-constancy", o, "1e-8", s);
    }

    {  // 8. Purely transverse charts: the adapted and foliated pipelines
       //    agree to 1e-10, and codimension-one charts are rejected with a
       //    dedicated error by both the connection builder and the
       //    quantizer.
        Outcome o;
        const double s = timed([&] {
            for (int q = 2; q <= 3; ++q)
                o.fold(folq::run_suite(
                    make_spec("p0-consistency", Cell{0, q}, 3, 5, 6, 1e-10,
                              801 + static_cast<std::uint64_t>(q))));
            for (int p = 1; p <= 2; ++p)
                o.fold(folq::run_suite(make_spec(
                    "q1-rejection", Cell{p, 1}, 2, 1, 1, 0.0,
                    811 + static_cast<std::uint64_t>(p))));
        });
        total += s;
        all &= report(8, "transverse reduction + codim-1 rejection", o,
                      "1e-10 / exact", s);
    }

    {  // 9. Pushing every ingredient forward through a nonlinear
       //    leaf-preserving diffeomorphism changes the quantized value by
       //    less than 1e-7 relative.
        Outcome o;
        const double s = timed([&] {
            run_over_grid(o, "naturality-pushforward", 3, 5, 4, 1e-7, 901);
        });
        total += s;
        all &= report(9, "naturality under adapted diffeomorphisms", o, "1e-7",
                      s);
    }

    {  // 10. Mutation guard: flipping the sign of the trace deformation must
       //     break the transverse trace conditions by a wide margin on every
       //     shape, while the unflipped construction passes them.
        Outcome o;
        const double s = timed([&] {
            for (std::size_t ci = 0; ci < std::size(kCells); ++ci) {
                const Cell& c = kCells[ci];
                const auto chart = folq::detail::box_chart(c.p, c.q);
                folq::Rng rng(kSeed + 1001 + 7 * ci);
                const auto conn = folq::random_adapted_connection(chart, rng);
                const auto good =
                    folq::check_normal(folq::make_normal_cartan(conn), 5, kSeed);
                const auto bad = folq::check_normal(
                    folq::make_cartan(conn, folq::DeformationMode::
                                                flipped_transverse_trace),
                    5, kSeed);
                const double violation = std::max(bad.trace1, bad.trace2);
                const bool detected = good.ok && !bad.ok && violation > 1e-3;
                CheckReport r;
                r.name = "flip-detection";
                r.pass = detected;
                r.worst = detected ? 0.0 : 1.0;
                r.tolerance = 0.0;
                {
                    char buf[128];
                    std::snprintf(buf, sizeof buf,
                                  "p=%d q=%d violation=%.3e good_ok=%d bad_ok=%d",
                                  c.p, c.q, violation, int(good.ok),
                                  int(bad.ok));
                    r.worst_case = buf;
                }
                o.fold(r);
            }
        });
        total += s;
        all &= report(10, "sign-flip mutation is detected", o, "exact", s);
    }

    std::printf("total %.1fs\n", total);
    std::printf(all ? "ALL CRITERIA PASSED\n" : "CRITERIA FAILED\n");
    return all ? 0 : 1;
}
