#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nematic/grid.hpp"

namespace nematic {

/// Field snapshot: `<base>.bin` holds the components back to back, each as
/// nx * ny little-endian float64 in row-major (i, j) order; `<base>.json`
/// is the sidecar {nx, ny, bc_mode, time, component_names}.
struct Snapshot {
  Grid grid;
  double time = 0.0;
  std::vector<std::string> component_names;
  std::vector<Samples> components;
};

void write_snapshot(const std::filesystem::path& base, const Snapshot& snap);
/// Throws std::runtime_error naming the file on missing or inconsistent data.
Snapshot read_snapshot(const std::filesystem::path& base);

Snapshot director_snapshot(const Grid& g, double t, const VectorField& d);
VectorField director_from_snapshot(const Snapshot& snap);

}  // namespace nematic
