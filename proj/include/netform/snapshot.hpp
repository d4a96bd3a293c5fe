// Binary snapshot files holding one (m, p, t) state.
//
// Layout: magic "NWF1", version u32, dim u32, n per axis u32 each, extent f64
// each, time f64, then p values f64 row-major, then each m component. All
// integers and doubles little-endian; the payload length is determined exactly
// by the header and round trips are bit-exact.
#pragma once

#include <string>

#include "netform/coupling.hpp"

namespace netform {

struct Snapshot {
    Grid grid;
    VectorField m;
    ScalarField p;
    double time;
};

void write_snapshot(const std::string& path, const VectorField& m,
                    const ScalarField& p, double time);

// Throws FormatError on bad magic/version/length and IoError on I/O failure.
Snapshot read_snapshot(const std::string& path);

// Writes snap_000000.nwf, snap_000001.nwf, ... into dir (created if needed).
void write_trajectory(const std::string& dir, const Trajectory& traj);

// Reads every snap_*.nwf in dir in filename order.
Trajectory read_trajectory(const std::string& dir);

} // namespace netform
