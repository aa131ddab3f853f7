// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "folq/config.hpp"
#include "folq/quantize.hpp"

using namespace folq;

namespace {

const char* kSample = R"cfg(# demo configuration
[dims]
p = 1
q = 2

[domain]
lo = -1 -1 -1
hi =  1  1  1

[connection]
Gamma[1][1][2] = y1*y2        # tangential upper block
Gamma[2][2][2] = 0.25*y2
Gamma[2][2][3] = 0.1
Gamma[3][3][3] = sin(y1)

[symbol]
k = 2
S[0,2,0] = 1 + y2
S[0,1,1] = y1*y2
S[0,0,2] = 0.5

[function]
f = y1^2 - 2*y2

[points]
point = 0.2 -0.3 0.4
point = 0 0.1 -0.5
)cfg";

}  // namespace

TEST_CASE("a complete configuration parses into usable objects", "[config]") {
    const auto cfg = parse_config(kSample);
    CHECK(cfg.p == 1);
    CHECK(cfg.q == 2);
    CHECK(cfg.degree == 2);
    REQUIRE(cfg.points.size() == 2);
    CHECK(cfg.points[0] == std::vector<double>{0.2, -0.3, 0.4});

    const auto c = cfg.chart();
    CHECK(c.n() == 3);
    CHECK(c.domain.lo == std::vector<double>(3, -1.0));

    // Christoffel entries land where addressed, 0-based, with mirrors.
    const auto conn = cfg.connection();
    const std::vector<double> m{0.2, -0.3, 0.4};
    const auto g = conn.eval_gamma(make_jet_point(m));
    const int n = 3;
    CHECK(g[(0 * n + 0) * n + 1].std() == Catch::Approx(-0.3 * 0.4));
    CHECK(g[(0 * n + 1) * n + 0].std() == Catch::Approx(-0.3 * 0.4));  // mirror
    CHECK(g[(1 * n + 1) * n + 1].std() == Catch::Approx(0.25 * 0.4));  // y2 = slot 2
    CHECK(g[(1 * n + 1) * n + 2].std() == Catch::Approx(0.1));
    CHECK(g[(2 * n + 2) * n + 2].std() == Catch::Approx(std::sin(-0.3)));
    CHECK(g[(2 * n + 0) * n + 0].std() == 0.0);  // unlisted entries are zero

    // Symbol components land at their multi-index ranks; others are zero.
    const auto S = cfg.symbol();
    const auto sv = S.eval(make_jet_point(m));
    CHECK(sv[MultiIndex{0, 2, 0}].std() == Catch::Approx(1.0 + 0.4));
    CHECK(sv[MultiIndex{0, 1, 1}].std() == Catch::Approx(-0.3 * 0.4));
    CHECK(sv[MultiIndex{0, 0, 2}].std() == Catch::Approx(0.5));
    CHECK(sv[MultiIndex{2, 0, 0}].std() == 0.0);
    CHECK(sv[MultiIndex{1, 1, 0}].std() == 0.0);

    REQUIRE(cfg.has_function());
    CHECK(cfg.function().at(m) == Catch::Approx(0.09 - 0.8));

    // The assembled connection is a valid adapted connection.
    CHECK(validate_adapted(conn, 5, 7).ok);
}

TEST_CASE("domain defaults to the unit box when omitted", "[config]") {
    const auto cfg = parse_config("[dims]\np = 0\nq = 2\n");
    CHECK(cfg.domain.lo == std::vector<double>(2, -1.0));
    CHECK(cfg.domain.hi == std::vector<double>(2, 1.0));
    CHECK_FALSE(cfg.has_function());
    CHECK(cfg.points.empty());
    CHECK(cfg.symbol().degree == 0);
}

TEST_CASE("parse errors carry byte offsets into the file", "[config]") {
    auto offset_of = [](const std::string& text) -> std::size_t {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.offset;
        }
        return static_cast<std::size_t>(-1);
    };

    // Malformed expression: offset points into the expression text.
    const std::string bad_expr = "[dims]\np = 1\nq = 2\n[function]\nf = y1 + * y2\n";
    const std::size_t star = bad_expr.find('*');
    CHECK(offset_of(bad_expr) == star);

    // Unknown section named at its header.
    const std::string bad_section = "[dims]\np = 1\nq = 2\n[wrong]\n";
    CHECK(offset_of(bad_section) == bad_section.find("[wrong]") + 1);

    // Out-of-range Christoffel index flagged at the index.
    const std::string bad_index =
        "[dims]\np = 1\nq = 2\n[connection]\nGamma[4][1][1] = 1\n";
    CHECK(offset_of(bad_index) == bad_index.find("4]["));

    // A variable outside the declared blocks is a parse error.
    const std::string bad_var = "[dims]\np = 1\nq = 2\n[function]\nf = y3\n";
    CHECK(offset_of(bad_var) == bad_var.find("y3"));
}

TEST_CASE("structural mistakes are rejected", "[config]") {
    CHECK_THROWS_AS(parse_config("p = 1\n"), ParseError);             // key before section
    CHECK_THROWS_AS(parse_config("[function]\nf = 1\n"), ParseError); // dims not first
    CHECK_THROWS_AS(parse_config("[dims]\np = 1\n"), ParseError);     // q missing
    CHECK_THROWS_AS(parse_config("[dims]\np = -1\nq = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[dims]\np = 1\nq = 0\n"), ParseError);
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[domain]\nlo = -1 -1 -1\n"),
        ParseError);  // hi missing
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[domain]\nlo = -1 -1\nhi = 1 1 1\n"),
        ParseError);  // extent mismatch
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[symbol]\nS[1,0,0] = 1\n"),
        ParseError);  // k not declared
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[symbol]\nk = 2\nS[1,0,0] = 1\n"),
        ParseError);  // degree mismatch
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[symbol]\nk = 1\nS[1,0] = 1\n"),
        ParseError);  // wrong arity
    CHECK_THROWS_AS(
        parse_config("[dims]\np = 1\nq = 2\n[points]\npoint = 1 2\n"),
        ParseError);  // point dimension
    CHECK_THROWS_AS(parse_config("[dims]\np = 1\np = 2\nq = 2\n"), ParseError);
}

TEST_CASE("symmetric Christoffel mirrors conflict as duplicates", "[config]") {
    const std::string dup =
        "[dims]\np = 1\nq = 2\n[connection]\n"
        "Gamma[2][2][3] = 1\nGamma[2][3][2] = 2\n";
    try {
        parse_config(dup);
        FAIL("expected a duplicate-entry error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        CHECK(e.offset == dup.find("Gamma[2][3][2]"));
    }
}

TEST_CASE("q = 1 parses but the quantization entry points reject it", "[config]") {
    const auto cfg = parse_config("[dims]\np = 1\nq = 1\n[function]\nf = y1\n");
    CHECK(cfg.q == 1);
    const auto conn = cfg.connection();  // construction alone is fine
    CHECK_THROWS_AS(make_normal_cartan(conn), EvalError);
    CHECK_THROWS_AS(
        quantize_adapted(conn, cfg.symbol(), cfg.function(), std::vector<double>{0, 0}),
        EvalError);
}
