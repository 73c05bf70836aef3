#pragma once

// Positive hazard rate families with closed-form cumulative hazard and inverse.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toe {

/// A strictly positive hazard h(t) on [0, inf).
///
/// Two families are supported: a constant rate, and a piecewise-constant rate
/// with breakpoints b_1 < ... < b_k (the first segment starts at 0 and there is
/// one more rate than breakpoints). On a breakpoint the right segment applies.
/// Both families give an exact, piecewise-linear cumulative hazard, so the
/// inverse is available without root finding.
class HazardSpec {
public:
    enum class Family { constant, piecewise };

    static HazardSpec constant(double rate) {
        check_rate(rate, "rate");
        return HazardSpec(Family::constant, {}, {rate});
    }

    static HazardSpec piecewise(std::vector<double> breaks, std::vector<double> rates) {
        if (rates.size() != breaks.size() + 1) {
            throw std::invalid_argument("piecewise hazard needs exactly one more rate than breakpoints (got " +
                                        std::to_string(breaks.size()) + " breaks, " +
                                        std::to_string(rates.size()) + " rates)");
        }
        for (std::size_t i = 0; i < rates.size(); ++i) {
            check_rate(rates[i], "rates[" + std::to_string(i) + "]");
        }
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            if (!std::isfinite(breaks[i]) || breaks[i] <= 0.0) {
                throw std::invalid_argument("piecewise hazard breakpoints must be finite and > 0");
            }
            if (i > 0 && breaks[i] <= breaks[i - 1]) {
                throw std::invalid_argument("piecewise hazard breakpoints must be strictly increasing");
            }
        }
        return HazardSpec(Family::piecewise, std::move(breaks), std::move(rates));
    }

    Family family() const noexcept { return family_; }
    bool is_constant() const noexcept { return breaks_.empty(); }
    std::span<const double> breaks() const noexcept { return breaks_; }
    std::span<const double> rates() const noexcept { return rates_; }

    /// Rate of the first segment; this is the whole hazard for constant specs.
    double initial_rate() const noexcept { return rates_.front(); }

    double evaluate(double t) const {
        check_time(t, "evaluate");
        return rates_[segment_of(t)];
    }

    /// Integrated hazard on [0, t].
    double cumulative(double t) const {
        check_time(t, "cumulative");
        const std::size_t k = segment_of(t);
        return cum_at_start_[k] + rates_[k] * (t - segment_start(k));
    }

    /// Integrated hazard on [a, b]; negative when b < a.
    double cumulative_between(double a, double b) const { return cumulative(b) - cumulative(a); }

    /// The unique t >= 0 with cumulative(t) == x.
    double inverse_cumulative(double x) const {
        if (!(x >= 0.0)) {
            throw std::domain_error("inverse_cumulative: argument must be >= 0");
        }
        // Segment k covers cumulative values [cum_at_start_[k], cum_at_start_[k+1]).
        const auto it = std::upper_bound(cum_at_start_.begin(), cum_at_start_.end(), x);
        const auto k = static_cast<std::size_t>(std::distance(cum_at_start_.begin(), it)) - 1;
        if (x == cum_at_start_[k]) {
            return segment_start(k);
        }
        return segment_start(k) + (x - cum_at_start_[k]) / rates_[k];
    }

    /// Pointwise sum of two hazards. Constant + constant stays constant.
    friend HazardSpec operator+(const HazardSpec& a, const HazardSpec& b) {
        if (a.is_constant() && b.is_constant()) {
            return constant(a.initial_rate() + b.initial_rate());
        }
        std::vector<double> merged;
        std::ranges::merge(a.breaks_, b.breaks_, std::back_inserter(merged));
        const auto dup = std::ranges::unique(merged);
        merged.erase(dup.begin(), dup.end());
        std::vector<double> rates;
        rates.reserve(merged.size() + 1);
        rates.push_back(a.initial_rate() + b.initial_rate());
        for (double t : merged) {
            rates.push_back(a.evaluate(t) + b.evaluate(t));
        }
        return piecewise(std::move(merged), std::move(rates));
    }

    friend bool operator==(const HazardSpec& a, const HazardSpec& b) noexcept {
        return a.family_ == b.family_ && a.breaks_ == b.breaks_ && a.rates_ == b.rates_;
    }

    std::string describe() const {
        if (family_ == Family::constant) {
            return "constant(" + format_number(rates_.front()) + ")";
        }
        std::string out = "piecewise(breaks=[";
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
            out += (i ? "," : "") + format_number(breaks_[i]);
        }
        out += "], rates=[";
        for (std::size_t i = 0; i < rates_.size(); ++i) {
            out += (i ? "," : "") + format_number(rates_[i]);
        }
        return out + "])";
    }

private:
    HazardSpec(Family family, std::vector<double> breaks, std::vector<double> rates)
        : family_(family), breaks_(std::move(breaks)), rates_(std::move(rates)) {
        cum_at_start_.reserve(rates_.size());
        cum_at_start_.push_back(0.0);
        for (std::size_t k = 0; k < breaks_.size(); ++k) {
            cum_at_start_.push_back(cum_at_start_.back() + rates_[k] * (breaks_[k] - segment_start(k)));
        }
    }

    static void check_rate(double rate, const std::string& what) {
        if (!std::isfinite(rate) || rate <= 0.0) {
            throw std::invalid_argument("hazard " + what + " must be finite and > 0");
        }
    }

    static void check_time(double t, const char* op) {
        if (!(t >= 0.0)) {
            throw std::domain_error(std::string(op) + ": time must be >= 0");
        }
    }

    static std::string format_number(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    double segment_start(std::size_t k) const noexcept { return k == 0 ? 0.0 : breaks_[k - 1]; }

    // Right-continuous: a point equal to a breakpoint belongs to the right segment.
    std::size_t segment_of(double t) const noexcept {
        return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
    }

    Family family_;
    std::vector<double> breaks_;
    std::vector<double> rates_;
    std::vector<double> cum_at_start_;
};

}  // namespace toe
