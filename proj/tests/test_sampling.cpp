#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstddef>

#include "toe/sampling.hpp"

using namespace toe;
using Catch::Matchers::WithinAbs;

namespace {

TreatmentModel constant_model(double lw, double l0, double l1) {
    return {HazardSpec::constant(lw), HazardSpec::constant(l0), HazardSpec::constant(l1)};
}

TreatmentModel piecewise_model() {
    return {HazardSpec::piecewise({0.5, 2.0}, {0.4, 1.2, 0.8}), HazardSpec::piecewise({1.0}, {2.0, 0.7}),
            HazardSpec::piecewise({1.5}, {0.5, 1.5})};
}

}  // namespace

TEST_CASE("sample_pair with forced latents", "[sampling]") {
    const auto m = constant_model(1.0, 0.5, 2.0);
    const LatentDraws draws{1.0, 0.25};
    const auto correct = sample_pair(m, draws, InversionMode::correct);
    CHECK(correct.w == 1.0);
    CHECK(correct.y == 0.5);
    CHECK_FALSE(correct.absurd);
    CHECK(correct.draws == draws);

    // Flawed cumulative below w=1 is 0.5 - 2(1 - y) = 2y - 1.5; 2y - 1.5 = 0.25 gives y = 0.875.
    const auto flawed = sample_pair(m, draws, InversionMode::flawed);
    CHECK(flawed.w == 1.0);
    CHECK(flawed.y == 0.875);
    CHECK_FALSE(flawed.absurd);

    const auto no_effect = constant_model(1.0, 0.7, 0.7);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        REQUIRE(sample_pair(no_effect, 3, i, InversionMode::correct) ==
                sample_pair(no_effect, 3, i, InversionMode::flawed));
    }
}

TEST_CASE("batches are deterministic and independent of worker count", "[sampling]") {
    const auto m = piecewise_model();
    CHECK(sample_batch(m, 4, 42, InversionMode::correct) == sample_batch(m, 4, 42, InversionMode::correct));
    const auto one = sample_batch(m, 20011, 9, InversionMode::flawed, 1);
    CHECK(one == sample_batch(m, 20011, 9, InversionMode::flawed, 8));
    CHECK(one == sample_batch(m, 20011, 9, InversionMode::flawed, 3));
    CHECK_FALSE(one == sample_batch(m, 20011, 10, InversionMode::flawed, 1));
    CHECK_THROWS_AS(sample_batch(m, 0, 1, InversionMode::correct), std::domain_error);
    CHECK_THROWS_AS(coupled_sample(m, m, 0, 1), std::domain_error);
}

TEST_CASE("per-draw invariants", "[sampling][property]") {
    for (const auto& m : {constant_model(1.0, 0.5, 2.0), constant_model(1.0, 2.0, 0.5), piecewise_model()}) {
        const auto correct = sample_batch(m, 50000, 11, InversionMode::correct, 4);
        const auto flawed = sample_batch(m, 50000, 11, InversionMode::flawed, 4);
        for (std::size_t i = 0; i < correct.size(); ++i) {
            const auto& p = correct[i];
            REQUIRE_FALSE(p.absurd);
            REQUIRE(p.w >= 0.0);
            REQUIRE(p.y >= 0.0);
            // Regime classification: Y < W exactly when E_Y < Lambda_0(W).
            REQUIRE((p.y < p.w) == (p.draws.e_y < m.pre_treatment.cumulative(p.w)));
            // Reconstruction from the stored latents.
            REQUIRE_THAT(m.treatment.cumulative(p.w), WithinAbs(p.draws.e_w, 1e-12 * (1.0 + p.draws.e_w)));
            REQUIRE_THAT(conditional_integrated_hazard(m, p.w, p.y),
                         WithinAbs(p.draws.e_y, 1e-12 * (1.0 + p.draws.e_y)));
            const auto again = sample_pair(m, p.draws, InversionMode::correct);
            REQUIRE(std::abs(again.w - p.w) <= 1e-12);
            REQUIRE(std::abs(again.y - p.y) <= 1e-12);

            const auto& f = flawed[i];
            REQUIRE(f.draws == p.draws);
            REQUIRE(f.w == p.w);
            if (!f.absurd) {
                REQUIRE_THAT(jl_flawed_integrated_hazard(m, f.w, f.y),
                             WithinAbs(f.draws.e_y, 1e-12 * (1.0 + f.draws.e_y)));
            } else {
                REQUIRE(f.y < 0.0);
            }
        }
    }
}

TEST_CASE("cause shares and absurd rate at n = 1e6", "[sampling][slow]") {
    const auto m = constant_model(1.0, 0.5, 2.0);
    const auto batch = sample_batch(m, 1'000'000, 7, InversionMode::correct, 4);
    std::size_t y_first = 0;
    for (const auto& p : batch) y_first += p.y < p.w ? 1 : 0;
    // l0 / (l0 + lW)
    CHECK_THAT(static_cast<double>(y_first) / 1e6, WithinAbs(1.0 / 3.0, 0.002));

    // Oracle: absurd iff E_Y < (l0 - l1) W, so the rate is
    // int e^{-w} (1 - e^{-1.5 w}) dw = 1 - 1/2.5 = 0.6.
    const auto flawed = sample_batch(constant_model(1.0, 2.0, 0.5), 1'000'000, 7, InversionMode::flawed, 4);
    std::size_t absurd = 0;
    for (const auto& p : flawed) absurd += p.absurd ? 1 : 0;
    const double rate = static_cast<double>(absurd) / 1e6;
    CHECK(rate > 0.0);
    CHECK_THAT(rate, WithinAbs(0.6, 3.0 * std::sqrt(0.6 * 0.4 / 1e6)));
}

TEST_CASE("coupled batches share latents", "[sampling]") {
    const auto m1 = piecewise_model();
    const auto same = coupled_sample(m1, m1, 5000, 5);
    CHECK(same.first == same.second);

    const auto m2 = m1.with_post_treatment(HazardSpec::constant(9.0));
    const auto batches = coupled_sample(m1, m2, 20000, 5);
    std::size_t after = 0;
    std::size_t differ = 0;
    for (std::size_t i = 0; i < batches.first.size(); ++i) {
        const auto& a = batches.first[i];
        const auto& b = batches.second[i];
        REQUIRE(a.draws == b.draws);
        REQUIRE(a.w == b.w);
        REQUIRE((a.y < a.w) == (b.y < b.w));
        if (a.y < a.w) {
            REQUIRE(a == b);
        } else if (a.y > a.w) {
            ++after;
            differ += a.y != b.y ? 1 : 0;
        }
    }
    CHECK(after > 0);
    CHECK(differ == after);
}

TEST_CASE("mode collapse when h0 == h1", "[sampling]") {
    const auto h = HazardSpec::piecewise({0.4, 1.7}, {1.1, 0.3, 2.2});
    const TreatmentModel m{HazardSpec::constant(0.9), h, h};
    const auto modes = coupled_modes(m, 100000, 123, 2);
    CHECK(modes.first == modes.second);
}
