#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "leadform/sim.hpp"

namespace leadform {

/// `t,agent_1,...,agent_n`, one row per sample, fixed "%.10g" formatting so
/// identical runs give identical bytes.
void write_csv(std::ostream& os, const Trajectory& traj);

/// Positions against time, one polyline per agent.
std::string svg_time_plot(const Trajectory& traj, const std::string& title);

/// x-y paths of every agent for a two-axis run, with markers at each segment
/// boundary and at the end so consecutive formations are visible.
std::string svg_path_plot(const Trajectory& x, const Trajectory& y, const std::string& title);

}  // namespace leadform
