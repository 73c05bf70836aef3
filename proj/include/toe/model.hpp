#pragma once

// The homogeneous treatment-timing model: treatment time W with hazard h_W,
// outcome time Y with hazard h_0 before W and h_1 after W.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <stdexcept>
#include <vector>

#include "toe/hazard.hpp"
#include "toe/quadrature.hpp"

namespace toe {

/// Mass allowed beyond the truncation point of an improper integral.
inline constexpr double kTailMass = 1e-12;

/// Default absolute tolerance for the adaptive quadrature used on the model.
inline constexpr double kQuadratureTol = 1e-10;

struct TreatmentModel {
    HazardSpec treatment;       // h_W
    HazardSpec pre_treatment;   // h_0, outcome hazard at y <= W
    HazardSpec post_treatment;  // h_1, outcome hazard at y > W

    TreatmentModel with_post_treatment(HazardSpec h1) const { return {treatment, pre_treatment, std::move(h1)}; }
    TreatmentModel with_pre_treatment(HazardSpec h0) const { return {treatment, std::move(h0), post_treatment}; }

    bool has_treatment_effect() const { return !(pre_treatment == post_treatment); }

    friend bool operator==(const TreatmentModel&, const TreatmentModel&) = default;
};

/// Which integrated hazard of Y given W is inverted.
///   correct: Lambda_0(y) below w, Lambda_0(w) + int_w^y h_1 above.
///   flawed:  below w uses Lambda_0(w) - int_y^w h_1 instead.
enum class InversionMode { correct, flawed };

struct InversionResult {
    double time = 0.0;
    bool absurd = false;  // flawed mode produced a negative duration
};

namespace detail {

inline void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) {
        throw std::domain_error(std::string(what) + " must be >= 0");
    }
}

inline std::vector<double> cut_points(std::initializer_list<const HazardSpec*> hazards) {
    std::vector<double> cuts;
    for (const auto* h : hazards) {
        cuts.insert(cuts.end(), h->breaks().begin(), h->breaks().end());
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

}  // namespace detail

/// Point T >= from beyond which exp(-(Lambda(T) - Lambda(from))) < tail.
inline double survival_cutoff(const HazardSpec& h, double from, double tail = kTailMass) {
    return h.inverse_cumulative(h.cumulative(from) - std::log(tail));
}

inline double density_f_w(const TreatmentModel& m, double w) {
    detail::require_nonnegative(w, "density_f_w: w");
    return m.treatment.evaluate(w) * std::exp(-m.treatment.cumulative(w));
}

inline double conditional_integrated_hazard(const TreatmentModel& m, double w, double y) {
    detail::require_nonnegative(w, "conditional_integrated_hazard: w");
    detail::require_nonnegative(y, "conditional_integrated_hazard: y");
    if (y <= w) {
        return m.pre_treatment.cumulative(y);
    }
    return m.pre_treatment.cumulative(w) + m.post_treatment.cumulative_between(w, y);
}

/// The mis-signed variant: for y < w the post-treatment hazard is integrated
/// backwards from w, giving Lambda_0(w) - int_y^w h_1. Can be negative.
inline double jl_flawed_integrated_hazard(const TreatmentModel& m, double w, double y) {
    detail::require_nonnegative(w, "jl_flawed_integrated_hazard: w");
    detail::require_nonnegative(y, "jl_flawed_integrated_hazard: y");
    if (y < w) {
        // Grouped so that h_0 == h_1 reproduces Lambda_0(y) bit for bit.
        return (m.pre_treatment.cumulative(w) - m.post_treatment.cumulative(w)) + m.post_treatment.cumulative(y);
    }
    return conditional_integrated_hazard(m, w, y);
}

/// Solves integrated_hazard(w, y) == x for y.
///
/// In flawed mode the equation is solved on the whole real line, extending
/// int_0^y h_1 linearly below 0 with the first-segment rate of h_1. Negative
/// solutions are returned as they are, tagged absurd.
inline InversionResult invert_conditional(const TreatmentModel& m, double w, double x, InversionMode mode) {
    detail::require_nonnegative(w, "invert_conditional: w");
    detail::require_nonnegative(x, "invert_conditional: x");
    const double at_treatment = m.pre_treatment.cumulative(w);
    const double below_w = std::nextafter(w, 0.0);

    if (x >= at_treatment) {
        const double y = m.post_treatment.inverse_cumulative((x - at_treatment) + m.post_treatment.cumulative(w));
        return {std::max(y, w), false};  // clamp guards rounding across the regime boundary
    }
    if (mode == InversionMode::correct) {
        return {std::min(m.pre_treatment.inverse_cumulative(x), below_w), false};
    }
    // Flawed, y < w: need Lambda_1(y) = x - (Lambda_0(w) - Lambda_1(w)).
    const double target = x - (at_treatment - m.post_treatment.cumulative(w));
    if (target >= 0.0) {
        return {std::min(m.post_treatment.inverse_cumulative(target), below_w), false};
    }
    return {target / m.post_treatment.initial_rate(), true};
}

inline double density_f_y_given_w(const TreatmentModel& m, double w, double y) {
    detail::require_nonnegative(w, "density_f_y_given_w: w");
    detail::require_nonnegative(y, "density_f_y_given_w: y");
    const auto& h = y <= w ? m.pre_treatment : m.post_treatment;
    return h.evaluate(y) * std::exp(-conditional_integrated_hazard(m, w, y));
}

/// -d/dy Pr(Y > y, Y < W) = h_0(y) exp(-Lambda_0(y) - Lambda_W(y)).
inline double subdensity_y_first(const TreatmentModel& m, double y) {
    detail::require_nonnegative(y, "subdensity_y_first: y");
    return m.pre_treatment.evaluate(y) * std::exp(-m.pre_treatment.cumulative(y) - m.treatment.cumulative(y));
}

/// -d/dw Pr(W > w, W < Y) = h_W(w) exp(-Lambda_W(w) - Lambda_0(w)).
inline double subdensity_w_first(const TreatmentModel& m, double w) {
    detail::require_nonnegative(w, "subdensity_w_first: w");
    return m.treatment.evaluate(w) * std::exp(-m.treatment.cumulative(w) - m.pre_treatment.cumulative(w));
}

/// Pr(Y > y, Y < W) computed from the joint distribution of (W, Y) rather
/// than from the sub-density:
///   int_y^T [exp(-Lambda_0(y)) - exp(-Lambda_0(w))] f_W(w) dw.
/// The neglected tail is bounded by exp(-Lambda_0(y) - Lambda_W(T)); an
/// explicit upper_truncation leaving more than 1e-10 there is rejected.
inline double subsurvival_y_first_quadrature(const TreatmentModel& m, double y, double upper_truncation,
                                             const QuadratureOptions& options = {kQuadratureTol}) {
    detail::require_nonnegative(y, "subsurvival_y_first_quadrature: y");
    const double survival_y = std::exp(-m.pre_treatment.cumulative(y));
    if (upper_truncation <= y) {
        throw std::invalid_argument("subsurvival_y_first_quadrature: upper_truncation must exceed y");
    }
    if (survival_y * std::exp(-m.treatment.cumulative(upper_truncation)) >= 1e-10) {
        throw std::invalid_argument("subsurvival_y_first_quadrature: upper_truncation leaves tail mass >= 1e-10");
    }
    const auto integrand = [&](double w) {
        return (survival_y - std::exp(-m.pre_treatment.cumulative(w))) * density_f_w(m, w);
    };
    const auto cuts = detail::cut_points({&m.treatment, &m.pre_treatment});
    return integrate(integrand, y, upper_truncation, options, cuts).value;
}

inline double subsurvival_y_first_quadrature(const TreatmentModel& m, double y,
                                             const QuadratureOptions& options = {kQuadratureTol}) {
    detail::require_nonnegative(y, "subsurvival_y_first_quadrature: y");
    return subsurvival_y_first_quadrature(m, y, survival_cutoff(m.treatment, y), options);
}

/// Pr(W > w, W < Y) = int_w^T exp(-Lambda_0(t)) f_W(t) dt, the same
/// construction for the other cause.
inline double subsurvival_w_first_quadrature(const TreatmentModel& m, double w,
                                             const QuadratureOptions& options = {kQuadratureTol}) {
    detail::require_nonnegative(w, "subsurvival_w_first_quadrature: w");
    const auto integrand = [&](double t) { return std::exp(-m.pre_treatment.cumulative(t)) * density_f_w(m, t); };
    const auto upper = survival_cutoff(m.treatment + m.pre_treatment, w);
    const auto cuts = detail::cut_points({&m.treatment, &m.pre_treatment});
    return integrate(integrand, w, upper, options, cuts).value;
}

}  // namespace toe
