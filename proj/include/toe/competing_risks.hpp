#pragma once

// The identified minimum of (W, Y) and its sub-survival functions.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "toe/model.hpp"
#include "toe/quadrature.hpp"
#include "toe/sampling.hpp"

namespace toe {

enum class Cause { y_first, w_first, tie };

constexpr std::string_view to_string(Cause c) noexcept {
    switch (c) {
        case Cause::y_first: return "Y_FIRST";
        case Cause::w_first: return "W_FIRST";
        case Cause::tie: return "TIE";
    }
    return "?";
}

/// Strict comparison of the two durations; no validity checks.
constexpr Cause classify(double w, double y) noexcept {
    if (y < w) return Cause::y_first;
    if (w < y) return Cause::w_first;
    return Cause::tie;
}

struct IdentifiedMinimum {
    double t = 0.0;
    Cause cause = Cause::tie;

    friend bool operator==(const IdentifiedMinimum&, const IdentifiedMinimum&) = default;
};

/// Thrown when a flawed-mode pair with a negative duration is classified.
class AbsurdDrawError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline IdentifiedMinimum identify_minimum(const DurationPair& p) {
    if (p.absurd) {
        throw AbsurdDrawError("identify_minimum: absurd (negative-duration) draw cannot be classified");
    }
    return {std::min(p.w, p.y), classify(p.w, p.y)};
}

struct IdentifiedSample {
    std::vector<IdentifiedMinimum> minima;
    std::size_t absurd = 0;  // pairs skipped because they were flagged absurd
};

/// Identified minima of every non-absurd pair, with the number skipped.
inline IdentifiedSample identify_minima(std::span<const DurationPair> pairs) {
    IdentifiedSample out;
    out.minima.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (p.absurd) {
            ++out.absurd;
        } else {
            out.minima.push_back(identify_minimum(p));
        }
    }
    return out;
}

/// Pr(min(W, Y) > t) = exp(-Lambda_0(t) - Lambda_W(t)).
inline double minimum_survival(const TreatmentModel& m, double t) {
    return std::exp(-m.pre_treatment.cumulative(t) - m.treatment.cumulative(t));
}

/// Pr(T > t, cause) for cause Y_FIRST or W_FIRST. Depends only on h_W and h_0.
/// Closed form when both are constant, adaptive quadrature of the sub-density
/// otherwise.
inline double analytic_subsurvival(const TreatmentModel& m, Cause cause, double t,
                                   const QuadratureOptions& options = {kQuadratureTol}) {
    if (cause == Cause::tie) {
        throw std::invalid_argument("analytic_subsurvival: cause must be Y_FIRST or W_FIRST");
    }
    detail::require_nonnegative(t, "analytic_subsurvival: t");
    const auto& own = cause == Cause::y_first ? m.pre_treatment : m.treatment;
    if (m.treatment.is_constant() && m.pre_treatment.is_constant()) {
        const double total = m.treatment.initial_rate() + m.pre_treatment.initial_rate();
        return own.initial_rate() / total * std::exp(-total * t);
    }
    const auto combined = m.treatment + m.pre_treatment;
    const auto subdensity = [&](double s) { return own.evaluate(s) * std::exp(-combined.cumulative(s)); };
    return integrate(subdensity, t, survival_cutoff(combined, t), options, combined.breaks()).value;
}

}  // namespace toe
