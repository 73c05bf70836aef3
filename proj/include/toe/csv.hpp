#pragma once

// CSV emitters. Floating point is written with 17 significant digits so that
// every value round-trips exactly.

#include <charconv>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

#include "toe/competing_risks.hpp"
#include "toe/sampling.hpp"
#include "toe/stats.hpp"

namespace toe::csv {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

inline void write_samples(std::ostream& os, std::span<const DurationPair> pairs) {
    os << "w,y,cause,absurd,e_w,e_y\n";
    std::string line;
    for (const auto& p : pairs) {
        line.clear();
        line += format_double(p.w);
        line += ',';
        line += format_double(p.y);
        line += ',';
        line += to_string(classify(p.w, p.y));
        line += p.absurd ? ",1," : ",0,";
        line += format_double(p.draws.e_w);
        line += ',';
        line += format_double(p.draws.e_y);
        line += '\n';
        os << line;
    }
}

inline void write_subsurvival_grid(std::ostream& os, std::span<const GridRow> rows) {
    os << "t,empirical,analytic,abs_diff\n";
    for (const auto& r : rows) {
        os << format_double(r.t) << ',' << format_double(r.empirical) << ',' << format_double(r.analytic) << ','
           << format_double(r.abs_diff) << '\n';
    }
}

inline constexpr std::string_view kReportHeader = "experiment,cause,n,statistic,threshold,pass,absurd_rate";

inline void write_report_row(std::ostream& os, std::string_view experiment, std::string_view cause,
                             const GofReport& report, double absurd_rate) {
    os << experiment << ',' << cause << ',' << report.n << ',' << format_double(report.statistic) << ','
       << format_double(report.threshold) << ',' << (report.pass ? 1 : 0) << ',' << format_double(absurd_rate)
       << '\n';
}

}  // namespace toe::csv
