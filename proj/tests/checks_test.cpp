// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "folq/checks.hpp"
#include "folq/generators.hpp"

using namespace folq;

namespace {

CheckSpec named(const std::string& name) {
    CheckSpec s;
    s.name = name;
    return s;
}

}  // namespace

TEST_CASE("every registered suite passes at its default configuration", "[checks]") {
    const auto reports = run_all();
    REQUIRE(reports.size() == check_names().size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].name == check_names()[i]);
        INFO(reports[i].name << ": worst " << reports[i].worst << " vs tolerance "
                             << reports[i].tolerance << " at " << reports[i].worst_case);
        CHECK(reports[i].pass);
        CHECK(reports[i].pass == (reports[i].worst <= reports[i].tolerance));
    }
}

TEST_CASE("suite runs are deterministic functions of the spec", "[checks]") {
    const auto a = run_all(20260814);
    const auto b = run_all(20260814);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].pass == b[i].pass);
        CHECK(a[i].worst == b[i].worst);  // bitwise: same seed, same arithmetic
        CHECK(a[i].worst_case == b[i].worst_case);
    }
}

TEST_CASE("the registry passes under a different master seed", "[checks]") {
    for (const auto& rep : run_all(777)) {
        INFO(rep.name << ": worst " << rep.worst << " at " << rep.worst_case);
        CHECK(rep.pass);
    }
}

TEST_CASE("unknown suite names are rejected and valid names are listed", "[checks]") {
    auto spec = named("no-such-suite");
    CHECK_THROWS_AS(run_suite(spec), EvalError);
    try {
        run_suite(spec);
    } catch (const EvalError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("no-such-suite") != std::string::npos);
        CHECK(msg.find("structure-equation") != std::string::npos);
        CHECK(msg.find("q1-rejection") != std::string::npos);
    }
}

TEST_CASE("suites hold on wider and taller charts", "[checks]") {
    auto spec = named("structure-equation");
    spec.p = 2;
    spec.q = 3;
    spec.connections = 1;
    spec.points = 1;
    spec.tolerance = 1e-9;
    auto rep = run_suite(spec);
    INFO(rep.worst_case << " worst " << rep.worst);
    CHECK(rep.pass);

    spec = named("commutation");
    spec.p = 2;
    spec.q = 2;
    spec.k = 2;
    spec.connections = 1;
    spec.points = 2;
    spec.tolerance = 1e-8;
    rep = run_suite(spec);
    INFO(rep.worst_case << " worst " << rep.worst);
    CHECK(rep.pass);

    spec = named("fiber-independence");
    spec.p = 0;
    spec.q = 3;
    spec.k = 2;
    spec.connections = 1;
    spec.points = 2;
    spec.tolerance = 1e-8;
    rep = run_suite(spec);
    INFO(rep.worst_case << " worst " << rep.worst);
    CHECK(rep.pass);
}

TEST_CASE("flipping the transverse trace sign defeats the normality check", "[checks]") {
    const FoliatedChart c{1, 2, Box{{-1, -1, -1}, {1, 1, 1}}};
    Rng rng(4242);
    const auto conn = random_adapted_connection(c, rng);
    const auto good = check_normal(make_normal_cartan(conn), 3, 99);
    CHECK(good.ok);
    const auto bad = check_normal(make_cartan(conn, DeformationMode::flipped_transverse_trace), 3, 99);
    CHECK_FALSE(bad.ok);
    CHECK(bad.trace1 > 1e-3);  // a sign error is a gross failure, not a rounding one
}

TEST_CASE("reports carry the instance that produced the worst residual", "[checks]") {
    auto spec = named("normality");
    spec.connections = 1;
    spec.points = 2;
    auto rep = run_suite(spec);
    CHECK(rep.worst_case.find("p=1") != std::string::npos);
    CHECK(rep.worst_case.find("q=2") != std::string::npos);
    CHECK(rep.worst_case.find("m=(") != std::string::npos);
}
