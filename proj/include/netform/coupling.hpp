// Drivers: the time-marching coupled solver, the successive-approximation
// (Picard) scheme with its bound/contraction bookkeeping, and the life-span
// sweep over data scales.
#pragma once

#include <optional>
#include <vector>

#include "netform/parabolic.hpp"

namespace netform {

enum class RunStatus { completed, blew_up, solver_failed };

// Time-stamped (m, p) snapshots of one run. times[0] = 0 and the sequence is
// strictly increasing; stored fields are finite.
struct Trajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<VectorField> m;
    std::vector<ScalarField> p;
    RunStatus status = RunStatus::completed;
    double status_time = 0.0; // blow-up / failure time when status != completed

    explicit Trajectory(const Grid& g) : grid(g) {}
    std::size_t snapshot_count() const { return times.size(); }
};

struct RunConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int store_every = 1;
    double cg_tol = 1e-10;
    double eps_reg = 1e-12;
    double blowup_threshold = 1e6;
    ReactionMode reaction_mode = ReactionMode::semi_implicit;
};

// Alternates pressure solves and conductance steps. Stops early with status
// blew_up when sup|m| exceeds the threshold or values go non-finite; an inner
// solver failure is recorded as solver_failed with its time stamp.
Trajectory run_coupled(const PhysParams& params, const Grid& grid,
                       const RunConfig& cfg);

// Per-iterate records of the successive-approximation scheme:
//   a_k  = sup-norm of w_k over space-time,
//   b_k  = sup over t of || grad p_k ||_{2N', Omega}  (N' = grid dimension),
//   d_k  = a_k + b_k,
//   eta_k = integral over space-time of
//           |grad(w_k - w_{k-1})|^2 + |grad(p_k - p_{k-1})|^2   (k >= 1).
struct PicardTrace {
    std::vector<double> a, b, d;
    std::vector<double> eta; // eta[k-1] corresponds to iterate k
    double c0 = 0.0;         // plateau value, max of d_k
    bool non_contracting = false;

    std::size_t iterates() const { return a.size(); }
};

struct PicardConfig {
    RunConfig run;
    int k_max = 8;
    double tol = 1e-8; // stop when eta_k < tol * eta_1
};

// w_0 = m_0 and p_0 solves the anisotropic problem with tensor I + m0 (x) m0;
// for k >= 1, p_k solves -Lap p_k = S + div[(w_{k-1} . grad p_{k-1}) w_{k-1}]
// at every time level and w_k solves the linear parabolic problem with frozen
// forcing E^2 (w_{k-1} . grad p_{k-1}) grad p_{k-1}. Whole trajectories of the
// previous iterate are retained; the returned trajectory is the last iterate.
std::pair<PicardTrace, Trajectory> run_picard(const PhysParams& params,
                                              const Grid& grid,
                                              const PicardConfig& cfg);

struct SweepRow {
    double scale;
    double smallness; // scale * (||m0||_inf + ||S||_{2N'/3})
    double survival_time;
    RunStatus status;
};

struct SweepOptions {
    bool bisect = false;  // refine between smallest failing / largest surviving
    int bisect_steps = 4;
    int workers = 0;      // 0 = hardware concurrency
};

// Runs the coupled solver with data (s m0, s S) per scale and records the
// first blow-up/failure time, or t_target on completion. Failures are data,
// not errors. Rows come back sorted by scale, descending.
std::vector<SweepRow> lifespan_sweep(const PhysParams& params, const Grid& grid,
                                     const RunConfig& cfg, double t_target,
                                     std::vector<double> scales,
                                     const SweepOptions& opts = {});

} // namespace netform
