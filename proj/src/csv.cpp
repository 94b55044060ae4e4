#include "omsim/csv.hpp"

#include "omsim/errors.hpp"

#include <cmath>
#include <cstdio>

namespace omsim {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s, double omega1) {
    os << spectrum_header << '\n';
    for (const auto& pt : s.points) {
        os << format_double(pt.delta) << ',' << format_double(pt.delta / omega1 - 1.0) << ','
           << format_double(pt.eps_R.real()) << ',' << format_double(pt.eps_R.imag()) << ','
           << format_double(pt.a_plus.real()) << ',' << format_double(pt.a_plus.imag()) << '\n';
    }
}

std::string group_metric_row(const GroupMetricPoint& minus, const GroupMetricPoint& plus) {
    std::string regime;
    if (minus.error || plus.error) {
        regime = "error";
    } else if (minus.metric < 0.0 && plus.metric < 0.0) {
        regime = "fast";
    } else if (minus.metric > 0.0 && plus.metric > 0.0) {
        regime = "slow";
    } else {
        regime = "mixed";
    }
    return format_double(minus.pump_power) + ',' + format_double(minus.delta_eval) + ',' +
           format_double(plus.delta_eval) + ',' + format_double(minus.metric) + ',' +
           format_double(plus.metric) + ',' + regime;
}

void write_group_metric_csv(std::ostream& os, const std::vector<GroupMetricPoint>& points) {
    if (points.size() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "group metric points must come in minus/plus pairs");
    }
    os << group_metric_header << '\n';
    for (std::size_t i = 0; i < points.size(); i += 2) {
        os << group_metric_row(points[i], points[i + 1]) << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride) {
    if (stride == 0) stride = 1;
    os << trajectory_header << '\n';
    for (std::size_t i = 0; i < traj.size(); i += stride) {
        os << format_double(traj.t[i]) << ',' << format_double(traj.q1[i]) << ','
           << format_double(traj.p1[i]) << ',' << format_double(traj.q2[i]) << ','
           << format_double(traj.p2[i]) << ',' << format_double(traj.a[i].real()) << ','
           << format_double(traj.a[i].imag()) << '\n';
    }
}

} // namespace omsim
