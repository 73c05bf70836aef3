#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "toe/hazard.hpp"
#include "toe/quadrature.hpp"

using toe::HazardSpec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

HazardSpec two_step() { return HazardSpec::piecewise({1.0}, {0.5, 2.0}); }

// Composite Simpson on each constant segment; exact for piecewise-constant
// integrands once the panels are aligned with the breakpoints.
double simpson_cumulative(const HazardSpec& h, double t) {
    std::vector<double> edges{0.0};
    for (double b : h.breaks()) {
        if (b < t) edges.push_back(b);
    }
    edges.push_back(t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        const double mid = 0.5 * (a + b);
        // Evaluate strictly inside the segment so the right-continuity choice does not matter.
        const double fa = h.evaluate(a + (b - a) * 1e-9);
        const double fb = h.evaluate(b - (b - a) * 1e-9);
        total += (b - a) / 6.0 * (fa + 4.0 * h.evaluate(mid) + fb);
    }
    return total;
}

HazardSpec random_hazard(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> gap(0.05, 3.0);
    std::uniform_real_distribution<double> rate(0.01, 5.0);
    const int k = count(rng);
    if (k == 0) return HazardSpec::constant(rate(rng));
    std::vector<double> breaks;
    double t = 0.0;
    for (int i = 0; i < k; ++i) breaks.push_back(t += gap(rng));
    std::vector<double> rates;
    for (int i = 0; i <= k; ++i) rates.push_back(rate(rng));
    return HazardSpec::piecewise(breaks, rates);
}

}  // namespace

TEST_CASE("evaluate follows the family and right-continuity", "[hazard]") {
    CHECK(HazardSpec::constant(0.5).evaluate(3.0) == 0.5);
    CHECK(two_step().evaluate(1.0) == 2.0);
    CHECK(two_step().evaluate(0.25) == 0.5);
    CHECK(two_step().evaluate(std::nextafter(1.0, 0.0)) == 0.5);
    CHECK_THROWS_AS(two_step().evaluate(-1e-300), std::domain_error);
}

TEST_CASE("cumulative hazard closed form", "[hazard]") {
    CHECK(HazardSpec::constant(0.5).cumulative(2.0) == 1.0);
    CHECK_THAT(two_step().cumulative(2.0), WithinRel(simpson_cumulative(two_step(), 2.0), 1e-14));
    CHECK(two_step().cumulative(2.0) == 2.5);
    CHECK(two_step().cumulative(0.0) == 0.0);
    CHECK(HazardSpec::constant(3.0).cumulative(0.0) == 0.0);
    CHECK_THROWS_AS(two_step().cumulative(-0.1), std::domain_error);
    CHECK(two_step().cumulative_between(2.0, 1.0) == -2.0);
}

TEST_CASE("inverse cumulative hazard", "[hazard]") {
    CHECK(HazardSpec::constant(0.5).inverse_cumulative(1.0) == 2.0);
    CHECK(two_step().inverse_cumulative(2.5) == 2.0);
    CHECK(two_step().inverse_cumulative(0.5) == 1.0);
    CHECK(two_step().inverse_cumulative(0.0) == 0.0);
    CHECK(HazardSpec::constant(7.0).inverse_cumulative(0.0) == 0.0);
    CHECK_THROWS_AS(two_step().inverse_cumulative(-1.0), std::domain_error);
}

TEST_CASE("construction enforces the hazard invariants", "[hazard]") {
    CHECK_THROWS_AS(HazardSpec::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::constant(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::constant(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::piecewise({1.0}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::piecewise({1.0}, {0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::piecewise({2.0, 1.0}, {1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::piecewise({1.0, 1.0}, {1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(HazardSpec::piecewise({0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_NOTHROW(HazardSpec::piecewise({}, {1.0}));
}

TEST_CASE("round trip, monotonicity and quadrature agreement on random hazards", "[hazard][property]") {
    std::mt19937_64 rng(20190720);
    for (int trial = 0; trial < 200; ++trial) {
        const auto h = random_hazard(rng);
        INFO(h.describe());
        double previous = -1.0;
        for (int i = 0; i <= 2000; ++i) {
            const double t = 0.05 * i;
            const double cum = h.cumulative(t);
            REQUIRE(cum > previous);
            previous = cum;
            REQUIRE(std::abs(h.inverse_cumulative(cum) - t) <= 1e-12);
        }
        for (double t : {0.3, 1.7, 4.4, 12.0, 50.0}) {
            const auto quad = toe::integrate([&](double s) { return h.evaluate(s); }, 0.0, t, {1e-13}, h.breaks());
            REQUIRE_THAT(h.cumulative(t), WithinRel(quad.value, 1e-10));
            REQUIRE_THAT(h.cumulative(t), WithinRel(simpson_cumulative(h, t), 1e-10));
        }
    }
}

TEST_CASE("sum of hazards is pointwise", "[hazard]") {
    const auto a = two_step();
    const auto b = HazardSpec::piecewise({0.5, 1.0, 3.0}, {1.0, 2.0, 3.0, 4.0});
    const auto s = a + b;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 10.0}) {
        CHECK(s.evaluate(t) == a.evaluate(t) + b.evaluate(t));
        CHECK_THAT(s.cumulative(t), WithinAbs(a.cumulative(t) + b.cumulative(t), 1e-13));
    }
    const auto c = HazardSpec::constant(1.0) + HazardSpec::constant(0.5);
    CHECK(c.is_constant());
    CHECK(c.initial_rate() == 1.5);
}
