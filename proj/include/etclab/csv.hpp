#pragma once

#include <filesystem>
#include <string>

#include "etclab/simulate.hpp"

namespace etclab {

/// Fixed-format float for CSV cells: %.12g, decimal point, no separators.
std::string format_double(double v);

/// Writes content to path atomically (temp file in the same directory,
/// then rename). Creates parent directories as needed.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// CSV with header t, x_1..x_n, uhat_1..uhat_m, e_1..e_m.
std::string trajectory_csv(const Trajectory& traj);

/// CSV with header j, t_j, h_j, trigger_value. The last row's h_j cell is
/// empty (no successor event).
std::string events_csv(const EventLog& events);

void export_trajectory_csv(const Trajectory& traj,
                           const std::filesystem::path& path);
void export_events_csv(const EventLog& events,
                       const std::filesystem::path& path);

}  // namespace etclab
