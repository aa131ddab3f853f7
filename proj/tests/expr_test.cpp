// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <folq/expr.hpp>

#include <vector>

using namespace folq;

namespace {
double eval_at(const Expression& e, std::vector<double> pt) {
    return evaluate<double>(e, pt);
}
}  // namespace

TEST_CASE("parse and evaluate a polynomial in chart variables", "[expr]") {
    // p = 1, q = 2: slots are (x1, y1, y2).
    auto e = parse("y1*y2 + 2", 1, 2);
    CHECK(eval_at(e, {5.0, 1.0, 3.0}) == Catch::Approx(5.0));
    CHECK(eval_at(e, {0.0, -2.0, 0.5}) == Catch::Approx(1.0));
}

TEST_CASE("parse handles functions, powers and unary minus", "[expr]") {
    auto e = parse("sin(x1)*y2^2", 1, 2);
    CHECK(eval_at(e, {0.0, 7.0, 2.0}) == Catch::Approx(0.0));
    CHECK(eval_at(e, {1.0, 7.0, 2.0}) == Catch::Approx(4.0 * std::sin(1.0)));

    auto m = parse("-y1^2", 0, 2);
    CHECK(eval_at(m, {3.0, 0.0}) == Catch::Approx(-9.0));  // -(y1^2), not (-y1)^2

    auto c = parse("cos(y1) * exp(y2/2)", 0, 2);
    CHECK(eval_at(c, {0.25, -0.5}) ==
          Catch::Approx(std::cos(0.25) * std::exp(-0.25)));
}

TEST_CASE("operator precedence and associativity", "[expr]") {
    CHECK(eval_at(parse("2 + 3 * 4", 0, 1), {0.0}) == Catch::Approx(14.0));
    CHECK(eval_at(parse("2 - 3 - 4", 0, 1), {0.0}) == Catch::Approx(-5.0));
    CHECK(eval_at(parse("12 / 3 / 2", 0, 1), {0.0}) == Catch::Approx(2.0));
    CHECK(eval_at(parse("2*y1^3", 0, 1), {2.0}) == Catch::Approx(16.0));
}

TEST_CASE("parse errors carry byte offsets", "[expr]") {
    // Unknown identifier.
    try {
        parse("y1 + z1", 1, 2);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset == 5);
    }
    // Variable index beyond the declared block sizes.
    try {
        parse("y3 * 2", 1, 2);
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset == 0);
    }
    CHECK_THROWS_AS(parse("x1", 0, 2), ParseError);      // no tangential block
    CHECK_THROWS_AS(parse("y0", 0, 2), ParseError);      // 1-based indices
    CHECK_THROWS_AS(parse("(y1 + 2", 0, 2), ParseError); // unbalanced paren
    CHECK_THROWS_AS(parse("y1 +", 0, 2), ParseError);    // dangling operator
    CHECK_THROWS_AS(parse("y1^y2", 0, 2), ParseError);   // exponent not integer
    CHECK_THROWS_AS(parse("2^3^2", 0, 2), ParseError);   // chained ^ needs parens
    CHECK_THROWS_AS(parse("tan(y1)", 0, 2), ParseError); // unknown function
    CHECK_THROWS_AS(parse("", 0, 2), ParseError);
}

TEST_CASE("division by a zero standard part is an evaluation error", "[expr]") {
    auto e = parse("1/(y1 - 1)", 0, 2);
    CHECK(eval_at(e, {3.0, 0.0}) == Catch::Approx(0.5));
    CHECK_THROWS_AS(eval_at(e, {1.0, 0.0}), EvalError);
}

TEST_CASE("pretty printing reaches a fixed point after one round trip", "[expr]") {
    const std::vector<std::string> sources = {
        "y1*(y2+1) - x1^2/2",
        "-y1^2 + sin(y2)*exp(x1)",
        "(y1 + y2)^3",
        "1/(2 + cos(y1))",
        "y1 - (y2 - x1)",
        "2.5e-1 * y1",
    };
    for (const auto& src : sources) {
        auto e1 = parse(src, 1, 2);
        std::string s1 = pretty(e1);
        auto e2 = parse(s1, 1, 2);
        std::string s2 = pretty(e2);
        CHECK(s1 == s2);
        // The reparsed tree evaluates identically.
        for (auto pt : {std::vector<double>{0.3, -0.7, 1.1},
                        std::vector<double>{-1.0, 0.5, 0.25}})
            CHECK(evaluate<double>(e1, pt) ==
                  Catch::Approx(evaluate<double>(e2, pt)).margin(1e-14));
    }
}

TEST_CASE("programmatic expression builders", "[expr]") {
    // (y1 + 2)^2 built without the parser.
    auto e = expr_pow(expr_add(expr_var(0, 0, 2), expr_const(2.0, 0, 2)), 2);
    CHECK(eval_at(e, {1.0, 9.0}) == Catch::Approx(9.0));
    auto s = pretty(e);
    auto r = parse(s, 0, 2);
    CHECK(eval_at(r, {1.5, 0.0}) == Catch::Approx(12.25));
}
