#pragma once

// Globally adaptive 15-point Gauss-Kronrod integration on finite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toe {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_intervals = 5000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // sum of |K15 - G7| over the final partition
    std::size_t intervals = 0;
};

/// Thrown when the interval budget is exhausted before the tolerance is met.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double achieved, double requested)
        : std::runtime_error("quadrature did not converge: achieved error " + std::to_string(achieved) +
                             ", requested " + std::to_string(requested)),
          achieved_(achieved) {}

    double achieved_error() const noexcept { return achieved_; }

private:
    double achieved_;
};

namespace detail {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    friend bool operator<(const Panel& lhs, const Panel& rhs) noexcept { return lhs.error < rhs.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = f_center * kronrod_weights[7];
    double gauss = f_center * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * pair;
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * pair;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b]. Interior cut points (kinks or jumps of f) seed
/// the initial partition; points outside (a, b) are ignored.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& options = {},
                           std::span<const double> cut_points = {}) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::domain_error("integrate: bounds must be finite");
    }
    if (a == b) {
        return {};
    }
    if (b < a) {
        auto flipped = integrate(f, b, a, options, cut_points);
        flipped.value = -flipped.value;
        return flipped;
    }

    std::vector<double> edges{a};
    for (double c : cut_points) {
        if (c > a && c < b) {
            edges.push_back(c);
        }
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<detail::Panel> panels;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto p = detail::gauss_kronrod_15(f, edges[i], edges[i + 1]);
        value += p.value;
        error += p.error;
        panels.push(p);
    }

    const auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
    while (error > target()) {
        if (panels.size() >= options.max_intervals) {
            throw QuadratureError(error, target());
        }
        const auto worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Panel cannot be split further in floating point.
            throw QuadratureError(error, target());
        }
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from the final partition so the value does not carry the
    // cancellation residue of the incremental updates.
    QuadratureResult result;
    result.intervals = panels.size();
    std::vector<detail::Panel> final_panels;
    final_panels.reserve(panels.size());
    while (!panels.empty()) {
        final_panels.push_back(panels.top());
        panels.pop();
    }
    std::sort(final_panels.begin(), final_panels.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    double sum = 0.0;
    double compensation = 0.0;
    for (const auto& p : final_panels) {
        const double y = p.value - compensation;
        const double t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
        result.error += p.error;
    }
    result.value = sum;
    return result;
}

}  // namespace toe
