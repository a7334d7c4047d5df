#include "etclab/csv.hpp"

#include <cstdio>
#include <fstream>

#include "etclab/errors.hpp"

namespace etclab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out.good()) throw ConfigError("atomic_write: write failed");
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& traj) {
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  const int m = traj.inputs.empty() ? 0 : static_cast<int>(traj.inputs[0].size());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",uhat_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",e_" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) out += "," + format_double(traj.states[k][i]);
    for (int i = 0; i < m; ++i) out += "," + format_double(traj.inputs[k][i]);
    for (int i = 0; i < m; ++i) out += "," + format_double(traj.errors[k][i]);
    out += "\n";
  }
  return out;
}

std::string events_csv(const EventLog& events) {
  std::string out = "j,t_j,h_j,trigger_value\n";
  for (std::size_t j = 0; j < events.times.size(); ++j) {
    out += std::to_string(j) + "," + format_double(events.times[j]) + ",";
    if (j + 1 < events.times.size()) {
      out += format_double(events.times[j + 1] - events.times[j]);
    }
    out += "," + format_double(events.trigger_values[j]) + "\n";
  }
  return out;
}

void export_trajectory_csv(const Trajectory& traj,
                           const std::filesystem::path& path) {
  atomic_write(path, trajectory_csv(traj));
}

void export_events_csv(const EventLog& events,
                       const std::filesystem::path& path) {
  atomic_write(path, events_csv(events));
}

}  // namespace etclab
