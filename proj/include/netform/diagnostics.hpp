// Read-only analyses over trajectories: energy identities, local means and
// excess functionals, oscillation decay, level-set measures, and empirical
// Hoelder exponents. Balls and cylinders are node index sets clipped to the
// domain; space integrals use the grid quadrature and time integrals the
// trapezoid rule over stored snapshots.
#pragma once

#include <array>
#include <cstdint>

#include "netform/coupling.hpp"

namespace netform {

// Terms of the first energy identity at checkpoint tau:
//   kinetic + diffusion + activation + metabolic + pressure = initial + work.
struct EnergyTerms {
    double tau;
    double kinetic;    // 1/2 int |m(tau)|^2
    double diffusion;  // D^2 int_0^tau int |grad m|^2
    double activation; // E^2 int_0^tau int (m . grad p)^2
    double metabolic;  // int_0^tau int |m|^(2 gamma)
    double pressure;   // 2 E^2 int_0^tau int |grad p|^2
    double initial;    // 1/2 int |m0|^2
    double work;       // 2 E^2 int_0^tau int S p
    double lhs, rhs, residual;
};

// Terms of the second identity (time-derivative form); dt m is evaluated by
// finite differences of consecutive snapshots and p0 by a fresh elliptic
// solve with m(0).
struct SecondIdentityTerms {
    double tau;
    double time_derivative; // int_0^tau int |dt m|^2
    double diffusion;       // D^2/2 int |grad m(tau)|^2
    double activation;      // E^2/2 int (m . grad p)^2 at tau
    double pressure;        // E^2/2 int |grad p(tau)|^2
    double metabolic;       // 1/(2 gamma) int |m(tau)|^(2 gamma)
    double initial;         // the same four terms evaluated at (m0, p0)
    double lhs, rhs, residual;
};

struct EnergyReport {
    std::vector<EnergyTerms> rows;
    std::vector<SecondIdentityTerms> second;
};

// Checkpoints must coincide with stored times; throws InsufficientSnapshots
// otherwise or when fewer than two snapshots are stored.
EnergyReport energy_report(const Trajectory& traj, const PhysParams& params,
                           const std::vector<double>& checkpoints,
                           bool include_second = false);

struct ExcessRow {
    double r;
    std::vector<double> m_mean;                    // cylinder mean of m
    std::vector<std::pair<double, double>> p_mean; // (t, ball mean of p) in window
    double A_r;
    double E_r;
    bool clipped;
};

struct ExcessReport {
    std::array<double, 2> y;
    double tau;
    double beta;
    std::vector<ExcessRow> rows;
};

// A_r(z) = r^-N max_t int_ball (p - p_mean(t))^2 over stored times in the
// window [tau - r^2/2, tau + r^2/2]; E_r(z) = r^-(N+2) int_cyl |m - m_mean|^2
// + A_r + r^(2 beta). Throws EmptyBall / InsufficientSnapshots.
ExcessReport excess(const Trajectory& traj, std::array<double, 2> y, double tau,
                    const std::vector<double>& radii, double beta = 0.5);

struct OscillationReport {
    std::array<double, 2> y;
    std::vector<double> radii;
    std::vector<double> delta; // delta_r(y) = max_t (max - min of p on the ball)
    double beta_hat = 0.0;     // log-log slope of delta_r over r
    double fit_c = 0.0;        // delta_r ~ fit_c * r^beta_hat
    bool fit_valid = false;    // false when some delta_r vanishes
};

OscillationReport oscillation(const Trajectory& traj, std::array<double, 2> y,
                              const std::vector<double>& radii);

struct ScanThresholds {
    double excess = -1.0;      // negative = auto: 10 * median of min_r E_r
    double growth_ratio = 2.0; // ratio test over the two smallest radii
};

struct ProbeRecord {
    std::array<double, 2> y;
    double tau;
    bool singular;
    double min_excess; // min over radii of E_r(z)
    double max_mean;   // max over radii of |m_{z,r}|
    double con1_smallest, con1_ratio; // max_t |m_{y,r}(t)| and its r-down ratio
    double con2_smallest, con2_ratio; // max_t r^-(N-2) int_ball |grad m|^2
};

// Flags singular_candidate where min_r E_r exceeds the excess threshold AND a
// growth proxy increases by more than growth_ratio from the second-smallest to
// the smallest radius. Total on probes: degenerate probes come back regular.
std::vector<ProbeRecord> regularity_scan(const Trajectory& traj,
                                         const std::vector<std::array<double, 3>>& probes,
                                         const std::vector<double>& radii,
                                         const ScanThresholds& thr = {},
                                         double beta = 0.5);

struct DeGiorgiLevels {
    double k;
    double M; // sup |m0|^2
    std::vector<double> thresholds; // k_n = k - k/2^n + M
    std::vector<double> y;          // space-time measure of {|m|^2 >= k_n}
};

DeGiorgiLevels degiorgi_levels(const Trajectory& traj, double k, int n_max = 24);

struct HolderEstimate {
    double beta_hat = 0.0;
    double seminorm = 0.0;
    // per exponent: (beta, seminorm at half sample, seminorm at full sample)
    std::vector<std::array<double, 3>> table;
};

// Samples random space-time pairs and evaluates
//   |f(x1,t1) - f(x2,t2)| / (|x1-x2| + |t1-t2|^(1/2))^beta;
// beta_hat is the largest exponent whose max stays stable (within a factor
// 1.5) when the sample is doubled. Needs at least 2 snapshots.
HolderEstimate holder_estimate(const std::vector<double>& times,
                               const std::vector<ScalarField>& fields,
                               const std::vector<double>& exponent_grid,
                               int sample_pairs = 4096,
                               std::uint64_t seed = 97531u);

struct LpGrowthTable {
    std::vector<double> times;
    std::vector<double> exponents;              // n >= 1
    std::vector<std::vector<double>> integral;  // [time][exponent] of int |m|^(2n)
};

LpGrowthTable lp_growth(const Trajectory& traj, const std::vector<double>& exponents);

} // namespace netform
