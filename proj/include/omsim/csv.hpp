#pragma once

#include "omsim/group_index.hpp"
#include "omsim/oracle.hpp"
#include "omsim/response.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace omsim {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);

inline constexpr const char* spectrum_header =
    "delta_rad_s,delta_over_omega1_minus_1,re_eps_R,im_eps_R,re_a_plus,im_a_plus";
inline constexpr const char* group_metric_header =
    "power_W,omega_minus_rad_s,omega_plus_rad_s,metric_minus_s,metric_plus_s,regime";
inline constexpr const char* trajectory_header = "t_s,q1_m,p1_kgms,q2_m,p2_kgms,re_a,im_a";

void write_spectrum_csv(std::ostream& os, const Spectrum& s, double omega1);

/// One row per power; expects the Minus/Plus pairs produced by
/// group_metric_sweep. regime is fast, slow, mixed or error.
void write_group_metric_csv(std::ostream& os, const std::vector<GroupMetricPoint>& points);

/// Row fields for one Minus/Plus pair (without trailing newline).
std::string group_metric_row(const GroupMetricPoint& minus, const GroupMetricPoint& plus);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride = 1);

} // namespace omsim
