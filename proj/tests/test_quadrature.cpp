#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "toe/quadrature.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("Gauss-Kronrod integrates polynomials and smooth functions", "[quadrature]") {
    CHECK_THAT(toe::integrate([](double x) { return x * x * x; }, 0.0, 2.0).value, WithinAbs(4.0, 1e-13));
    CHECK_THAT(toe::integrate([](double x) { return std::exp(-x); }, 0.0, 30.0).value,
               WithinAbs(1.0 - std::exp(-30.0), 1e-13));
    CHECK_THAT(toe::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value,
               WithinAbs(2.0, 1e-12));
}

TEST_CASE("reversed and empty intervals", "[quadrature]") {
    CHECK(toe::integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
    CHECK_THAT(toe::integrate([](double x) { return x; }, 1.0, 0.0).value, WithinAbs(-0.5, 1e-15));
}

TEST_CASE("cut points resolve jumps", "[quadrature]") {
    const auto step = [](double x) { return x < 1.0 ? 0.5 : 2.0; };
    const std::vector<double> cuts{1.0};
    const auto r = toe::integrate(step, 0.0, 2.0, {1e-12}, cuts);
    CHECK_THAT(r.value, WithinAbs(2.5, 1e-14));
    CHECK(r.intervals == 2);
    // Without the cut the jump is found adaptively.
    CHECK_THAT(toe::integrate(step, 0.0, 2.0, {1e-9}).value, WithinAbs(2.5, 1e-9));
}

TEST_CASE("non-convergence reports the achieved error", "[quadrature]") {
    const auto wild = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); };
    try {
        toe::integrate(wild, 0.0, 1.0, {1e-15, 0.0, 20});
        FAIL("expected QuadratureError");
    } catch (const toe::QuadratureError& e) {
        CHECK(e.achieved_error() > 1e-15);
    }
    CHECK_THROWS_AS(toe::integrate(wild, 0.0, INFINITY), std::domain_error);
}
