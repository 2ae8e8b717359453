#pragma once

// Snapshot files: legacy structured-points volume format (ASCII, 17
// significant digits) with cell-centered scalar blocks and velocity
// interpolated to cell centers; the staggered face velocities and the time are
// stored as dataset field arrays so a snapshot reads back exactly. A JSON
// sidecar records the run metadata.

#include <string>

#include <json.hpp>

#include "pfreact/mesh.hpp"
#include "pfreact/scheme.hpp"

namespace pfreact {

void write_snapshot(const State& s, const GridSpec& g, const std::string& path);
/// Reads a file written by write_snapshot. The grid extents and cell counts
/// are recovered from the header; axis families are taken from `like`.
State read_snapshot(const std::string& path, const GridSpec& like, GridSpec* grid_out = nullptr);

void write_json(const nlohmann::json& j, const std::string& path);

}  // namespace pfreact
