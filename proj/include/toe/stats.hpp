#pragma once

// Empirical sub-survival curves, sup-distance goodness-of-fit tests, and the
// selected-subsample regression demonstration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "toe/competing_risks.hpp"
#include "toe/model.hpp"
#include "toe/quadrature.hpp"
#include "toe/sampling.hpp"

namespace toe {

/// Asymptotic 1% critical value of the sup-distance statistic.
inline constexpr double kOneSampleCritical = 1.63;
inline constexpr double kTwoSampleCritical = 1.628;

inline constexpr std::size_t kGridPoints = 1000;
inline constexpr double kGridQuantile = 0.999;
inline constexpr std::size_t kMinGofSample = 100;

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            correction_ += (sum_ - t) + v;
        } else {
            correction_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

struct SubsurvivalCurve {
    enum class Kind { empirical, analytic };

    Kind kind = Kind::empirical;
    Cause cause = Cause::y_first;
    std::vector<double> support;  // sorted
    std::vector<double> values;   // curve at each support point, nonincreasing
    double mass = 0.0;            // value just below the first support point

    /// Right-continuous step evaluation; only meaningful for empirical curves.
    double at(double t) const {
        const auto idx = static_cast<std::size_t>(std::upper_bound(support.begin(), support.end(), t) -
                                                  support.begin());
        return idx == 0 ? mass : values[idx - 1];
    }
};

namespace detail {

inline std::size_t non_tie_count(std::span<const IdentifiedMinimum> mins) {
    return static_cast<std::size_t>(
        std::ranges::count_if(mins, [](const IdentifiedMinimum& m) { return m.cause != Cause::tie; }));
}

inline std::vector<double> sorted_times(std::span<const IdentifiedMinimum> mins, Cause cause) {
    std::vector<double> times;
    for (const auto& m : mins) {
        if (m.cause == cause) {
            times.push_back(m.t);
        }
    }
    std::sort(times.begin(), times.end());
    return times;
}

inline void require_classifiable_cause(Cause cause, const char* op) {
    if (cause == Cause::tie) {
        throw std::invalid_argument(std::string(op) + ": cause must be Y_FIRST or W_FIRST");
    }
}

inline void reject_absurd(std::span<const DurationPair> pairs, const char* op) {
    if (std::ranges::any_of(pairs, [](const DurationPair& p) { return p.absurd; })) {
        throw AbsurdDrawError(std::string(op) + ": input contains absurd (negative-duration) draws");
    }
}

}  // namespace detail

/// S_n(t) = #{i : t_i > t, cause_i = cause} / n, with ties left out of n.
inline SubsurvivalCurve empirical_subsurvival(std::span<const IdentifiedMinimum> mins, Cause cause) {
    detail::require_classifiable_cause(cause, "empirical_subsurvival");
    const std::size_t n = detail::non_tie_count(mins);
    if (n == 0) {
        throw std::domain_error("empirical_subsurvival: no classifiable observations");
    }
    SubsurvivalCurve curve;
    curve.kind = SubsurvivalCurve::Kind::empirical;
    curve.cause = cause;
    curve.support = detail::sorted_times(mins, cause);
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::size_t k = curve.support.size();
    curve.mass = static_cast<double>(k) * inv_n;
    curve.values.resize(k);
    // Walk backwards so runs of equal times share the count of strictly larger ones.
    std::size_t larger = 0;
    for (std::size_t j = k; j-- > 0;) {
        if (j + 1 < k && curve.support[j + 1] > curve.support[j]) {
            larger = k - (j + 1);
        }
        curve.values[j] = static_cast<double>(larger) * inv_n;
    }
    return curve;
}

inline SubsurvivalCurve analytic_curve(const TreatmentModel& m, Cause cause, std::span<const double> grid) {
    detail::require_classifiable_cause(cause, "analytic_curve");
    SubsurvivalCurve curve;
    curve.kind = SubsurvivalCurve::Kind::analytic;
    curve.cause = cause;
    curve.support.assign(grid.begin(), grid.end());
    curve.values.reserve(grid.size());
    for (double t : grid) {
        curve.values.push_back(analytic_subsurvival(m, cause, t));
    }
    curve.mass = curve.values.empty() ? 0.0 : curve.values.front();
    return curve;
}

/// kGridPoints evenly spaced times on [0, 99.9th percentile of the minima].
inline std::vector<double> evaluation_grid(std::span<const IdentifiedMinimum> mins) {
    std::vector<double> times;
    times.reserve(mins.size());
    for (const auto& m : mins) {
        if (m.cause != Cause::tie) {
            times.push_back(m.t);
        }
    }
    if (times.empty()) {
        throw std::domain_error("evaluation_grid: no classifiable observations");
    }
    const auto q = static_cast<std::size_t>(kGridQuantile * static_cast<double>(times.size() - 1));
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(q), times.end());
    const double upper = times[q];
    std::vector<double> grid(kGridPoints);
    for (std::size_t k = 0; k < kGridPoints; ++k) {
        grid[k] = upper * static_cast<double>(k) / static_cast<double>(kGridPoints - 1);
    }
    return grid;
}

struct GridRow {
    double t;
    double empirical;
    double analytic;
    double abs_diff;
};

inline std::vector<GridRow> subsurvival_grid(std::span<const IdentifiedMinimum> mins, const TreatmentModel& m,
                                             Cause cause) {
    const auto empirical = empirical_subsurvival(mins, cause);
    const auto grid = evaluation_grid(mins);
    const auto analytic = analytic_curve(m, cause, grid);
    std::vector<GridRow> rows;
    rows.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double e = empirical.at(grid[k]);
        rows.push_back({grid[k], e, analytic.values[k], std::abs(e - analytic.values[k])});
    }
    return rows;
}

struct CurveDetail {
    Cause cause = Cause::y_first;
    double statistic = 0.0;  // sup-distance for this cause
    double argmax = 0.0;     // time at which it is attained
    std::size_t events = 0;  // observations of this cause (first sample for two-sample tests)
};

struct GofReport {
    double statistic = 0.0;
    std::size_t n = 0;
    double threshold = 0.0;
    bool pass = false;
    std::vector<CurveDetail> details;
};

inline double one_sample_threshold(std::size_t n) { return kOneSampleCritical / std::sqrt(static_cast<double>(n)); }

inline double two_sample_threshold(std::size_t n, std::size_t m) {
    const double a = static_cast<double>(n);
    const double b = static_cast<double>(m);
    return kTwoSampleCritical * std::sqrt((a + b) / (a * b));
}

/// Sup-distance over an evaluated grid, for a sample of n classifiable minima.
inline GofReport gof_from_grid(std::span<const GridRow> rows, std::size_t n, Cause cause, std::size_t events) {
    GofReport report;
    report.n = n;
    report.threshold = one_sample_threshold(n);
    CurveDetail detail{cause, 0.0, 0.0, events};
    for (const auto& r : rows) {
        if (r.abs_diff > detail.statistic) {
            detail.statistic = r.abs_diff;
            detail.argmax = r.t;
        }
    }
    report.statistic = detail.statistic;
    report.pass = report.statistic <= report.threshold;
    report.details.push_back(detail);
    return report;
}

/// One-sample sup-distance between the empirical and analytic sub-survival
/// of `cause`, on the kGridPoints evaluation grid, against 1.63 / sqrt(n).
inline GofReport gof_subsurvival(std::span<const IdentifiedMinimum> mins, const TreatmentModel& m, Cause cause) {
    detail::require_classifiable_cause(cause, "gof_subsurvival");
    const std::size_t n = detail::non_tie_count(mins);
    if (n < kMinGofSample) {
        throw std::domain_error("gof_subsurvival: need at least 100 classifiable observations, got " +
                                std::to_string(n));
    }
    const auto rows = subsurvival_grid(mins, m, cause);
    const auto events = static_cast<std::size_t>(
        std::ranges::count_if(mins, [cause](const IdentifiedMinimum& x) { return x.cause == cause; }));
    return gof_from_grid(rows, n, cause, events);
}

/// Pair-level entry point; absurd-flagged input is rejected rather than filtered.
inline GofReport gof_subsurvival(std::span<const DurationPair> pairs, const TreatmentModel& m, Cause cause) {
    detail::reject_absurd(pairs, "gof_subsurvival");
    return gof_subsurvival(identify_minima(pairs).minima, m, cause);
}

/// Two-sample sup-distance between the per-cause empirical sub-survival
/// functions of two samples, maximized over both causes. Evaluated exactly at
/// every jump point rather than on a grid.
inline GofReport two_sample_subsurvival(std::span<const IdentifiedMinimum> a, std::span<const IdentifiedMinimum> b) {
    const std::size_t na = detail::non_tie_count(a);
    const std::size_t nb = detail::non_tie_count(b);
    if (na == 0 || nb == 0) {
        throw std::domain_error("two_sample_subsurvival: both samples need classifiable observations");
    }
    GofReport report;
    report.n = na;
    report.threshold = two_sample_threshold(na, nb);
    for (Cause cause : {Cause::y_first, Cause::w_first}) {
        const auto ta = detail::sorted_times(a, cause);
        const auto tb = detail::sorted_times(b, cause);
        const auto curve_a = [&](std::size_t passed) {
            return static_cast<double>(ta.size() - passed) / static_cast<double>(na);
        };
        const auto curve_b = [&](std::size_t passed) {
            return static_cast<double>(tb.size() - passed) / static_cast<double>(nb);
        };
        CurveDetail detail{cause, std::abs(curve_a(0) - curve_b(0)), 0.0, ta.size()};
        std::size_t ia = 0;
        std::size_t ib = 0;
        while (ia < ta.size() || ib < tb.size()) {
            double v = std::numeric_limits<double>::infinity();
            if (ia < ta.size()) v = ta[ia];
            if (ib < tb.size()) v = std::min(v, tb[ib]);
            while (ia < ta.size() && ta[ia] <= v) ++ia;
            while (ib < tb.size() && tb[ib] <= v) ++ib;
            const double d = std::abs(curve_a(ia) - curve_b(ib));
            if (d > detail.statistic) {
                detail.statistic = d;
                detail.argmax = v;
            }
        }
        report.statistic = std::max(report.statistic, detail.statistic);
        report.details.push_back(detail);
    }
    report.pass = report.statistic <= report.threshold;
    return report;
}

/// Seed of the second, independent stream in two-sample experiments.
constexpr std::uint64_t second_stream(std::uint64_t seed) noexcept { return seed + 0x9E3779B97F4A7C15ULL; }

/// Two-sample test between correct-mode batches of m1 and m2 drawn from
/// independent streams. No restriction on how the models differ.
inline GofReport two_sample_gof(const TreatmentModel& m1, const TreatmentModel& m2, std::size_t n,
                                std::uint64_t seed, unsigned workers = 1) {
    const auto a = identify_minima(sample_batch(m1, n, seed, InversionMode::correct, workers));
    const auto b = identify_minima(sample_batch(m2, n, second_stream(seed), InversionMode::correct, workers));
    return two_sample_subsurvival(a.minima, b.minima);
}

/// The identified minimum should not see h_1: models that share h_W and h_0
/// must pass the two-sample test.
inline GofReport h1_invariance_test(const TreatmentModel& m1, const TreatmentModel& m2, std::size_t n,
                                    std::uint64_t seed, unsigned workers = 1) {
    if (!(m1.treatment == m2.treatment) || !(m1.pre_treatment == m2.pre_treatment)) {
        throw std::invalid_argument("h1_invariance_test: models must share the treatment and pre-treatment hazards");
    }
    return two_sample_gof(m1, m2, n, seed, workers);
}

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    std::size_t selected = 0;
};

/// OLS of y on w over the pairs with y > w. A demonstration statistic only:
/// conditioning on y > w selects on the outcome.
inline RegressionFit naive_selected_regression(std::span<const DurationPair> pairs) {
    CompensatedSum sum_w;
    CompensatedSum sum_y;
    std::size_t k = 0;
    for (const auto& p : pairs) {
        if (p.y > p.w) {
            sum_w.add(p.w);
            sum_y.add(p.y);
            ++k;
        }
    }
    if (k < 2) {
        throw std::domain_error("naive_selected_regression: need at least 2 pairs with y > w, got " +
                                std::to_string(k));
    }
    const double kd = static_cast<double>(k);
    const double mean_w = sum_w.value() / kd;
    const double mean_y = sum_y.value() / kd;
    CompensatedSum sww;
    CompensatedSum swy;
    for (const auto& p : pairs) {
        if (p.y > p.w) {
            sww.add((p.w - mean_w) * (p.w - mean_w));
            swy.add((p.w - mean_w) * (p.y - mean_y));
        }
    }
    if (!(sww.value() > 0.0)) {
        throw std::domain_error("naive_selected_regression: selected w values have no spread");
    }
    RegressionFit fit;
    fit.selected = k;
    fit.slope = swy.value() / sww.value();
    fit.intercept = mean_y - fit.slope * mean_w;
    if (k > 2) {
        CompensatedSum rss;
        for (const auto& p : pairs) {
            if (p.y > p.w) {
                const double r = p.y - fit.intercept - fit.slope * p.w;
                rss.add(r * r);
            }
        }
        const double sigma2 = rss.value() / (kd - 2.0);
        fit.slope_se = std::sqrt(sigma2 / sww.value());
        fit.intercept_se = std::sqrt(sigma2 * (1.0 / kd + mean_w * mean_w / sww.value()));
    }
    return fit;
}

/// Share of pairs flagged absurd.
inline double absurd_rate(std::span<const DurationPair> pairs) {
    if (pairs.empty()) {
        return 0.0;
    }
    const auto k = std::ranges::count_if(pairs, [](const DurationPair& p) { return p.absurd; });
    return static_cast<double>(k) / static_cast<double>(pairs.size());
}

/// Probability that a flawed-mode draw is absurd:
///   int f_W(w) (1 - exp(-max(0, Lambda_0(w) - Lambda_1(w)))) dw.
/// A draw is absurd exactly when E_Y < Lambda_0(W) - Lambda_1(W).
inline double predicted_absurd_rate(const TreatmentModel& m, const QuadratureOptions& options = {kQuadratureTol}) {
    const auto integrand = [&](double w) {
        const double gap = m.pre_treatment.cumulative(w) - m.post_treatment.cumulative(w);
        return gap > 0.0 ? density_f_w(m, w) * -std::expm1(-gap) : 0.0;
    };
    const auto cuts = detail::cut_points({&m.treatment, &m.pre_treatment, &m.post_treatment});
    return integrate(integrand, 0.0, survival_cutoff(m.treatment, 0.0), options, cuts).value;
}

/// Share of classifiable minima with the given cause.
inline double cause_share(std::span<const IdentifiedMinimum> mins, Cause cause) {
    const std::size_t n = detail::non_tie_count(mins);
    if (n == 0) {
        throw std::domain_error("cause_share: no classifiable observations");
    }
    const auto k = std::ranges::count_if(mins, [cause](const IdentifiedMinimum& x) { return x.cause == cause; });
    return static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace toe
