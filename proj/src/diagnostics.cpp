#include "netform/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "netform/elliptic.hpp"
#include "netform/linalg.hpp"

namespace netform {

namespace {

constexpr double kEps = 1e-300;

double rel_residual(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max({lhs, rhs, kEps});
}

std::size_t checkpoint_index(const Trajectory& traj, double tau) {
    for (std::size_t n = 0; n < traj.times.size(); ++n)
        if (std::abs(traj.times[n] - tau) <= 1e-9 * std::max(1.0, std::abs(tau)))
            return n;
    throw InsufficientSnapshots("checkpoint does not coincide with a stored time");
}

// trapezoid weights over times[0..last]
std::vector<double> trapezoid_weights(const std::vector<double>& t, std::size_t last) {
    std::vector<double> w(last + 1, 0.0);
    for (std::size_t n = 0; n < last; ++n) {
        const double half = 0.5 * (t[n + 1] - t[n]);
        w[n] += half;
        w[n + 1] += half;
    }
    return w;
}

double grad_sq_quadrature(const VectorField& v) {
    double s = 0.0;
    for (int c = 0; c < v.dim(); ++c) {
        const VectorField g = gradient(v.comp[c]);
        for (int d = 0; d < g.dim(); ++d) s += inner(g.comp[d], g.comp[d]);
    }
    return s;
}

ScalarField activation_density(const VectorField& m, const ScalarField& p) {
    const VectorField gp = gradient(p);
    ScalarField out(m.grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int d = 0; d < m.dim(); ++d) s += m.comp[d][i] * gp.comp[d][i];
        out[i] = s * s;
    }
    return out;
}

double metabolic_quadrature(const VectorField& m, double gamma) {
    const ScalarField m2 = magnitude_squared(m);
    double s = 0.0;
    for (std::size_t i = 0; i < m2.size(); ++i)
        s += m2.grid.quad_weight(i) * std::pow(m2[i], gamma);
    return s;
}

double grad_sq_quadrature(const ScalarField& f) {
    const VectorField g = gradient(f);
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += inner(g.comp[d], g.comp[d]);
    return s;
}

} // namespace

EnergyReport energy_report(const Trajectory& traj, const PhysParams& params,
                           const std::vector<double>& checkpoints,
                           bool include_second) {
    if (traj.snapshot_count() < 2)
        throw InsufficientSnapshots("energy_report needs at least two snapshots");
    const double d2 = params.D * params.D;
    const double e2 = params.E * params.E;

    // per-snapshot space integrals, accumulated in time below
    const std::size_t nt = traj.snapshot_count();
    std::vector<double> grad_m(nt), act(nt), metab(nt), grad_p(nt), work(nt);
    for (std::size_t n = 0; n < nt; ++n) {
        grad_m[n] = grad_sq_quadrature(traj.m[n]);
        act[n] = quadrature(activation_density(traj.m[n], traj.p[n]));
        metab[n] = metabolic_quadrature(traj.m[n], params.gamma);
        grad_p[n] = grad_sq_quadrature(traj.p[n]);
        work[n] = inner(params.S, traj.p[n]);
    }
    const double initial = 0.5 * quadrature(magnitude_squared(traj.m[0]));

    EnergyReport report;
    for (double tau : checkpoints) {
        const std::size_t last = checkpoint_index(traj, tau);
        const std::vector<double> tw = trapezoid_weights(traj.times, last);
        EnergyTerms row{};
        row.tau = tau;
        row.kinetic = 0.5 * quadrature(magnitude_squared(traj.m[last]));
        for (std::size_t n = 0; n <= last; ++n) {
            row.diffusion += tw[n] * d2 * grad_m[n];
            row.activation += tw[n] * e2 * act[n];
            row.metabolic += tw[n] * metab[n];
            row.pressure += tw[n] * 2.0 * e2 * grad_p[n];
            row.work += tw[n] * 2.0 * e2 * work[n];
        }
        row.initial = initial;
        row.lhs = row.kinetic + row.diffusion + row.activation + row.metabolic +
                  row.pressure;
        row.rhs = row.initial + row.work;
        row.residual = rel_residual(row.lhs, row.rhs);
        report.rows.push_back(row);
    }

    if (include_second) {
        const ScalarField p0 = solve_pressure(traj.m[0], params.S);
        const double init2 = 0.5 * d2 * grad_sq_quadrature(traj.m[0]) +
                             0.5 * e2 * quadrature(activation_density(traj.m[0], p0)) +
                             metabolic_quadrature(traj.m[0], params.gamma) /
                                 (2.0 * params.gamma) +
                             0.5 * e2 * grad_sq_quadrature(p0);
        for (double tau : checkpoints) {
            const std::size_t last = checkpoint_index(traj, tau);
            SecondIdentityTerms row{};
            row.tau = tau;
            for (std::size_t n = 0; n + 1 <= last; ++n) {
                const double dt = traj.times[n + 1] - traj.times[n];
                double s = 0.0;
                for (int d = 0; d < traj.grid.dim(); ++d)
                    for (std::size_t i = 0; i < traj.grid.node_count(); ++i) {
                        const double diff =
                            traj.m[n + 1].comp[d][i] - traj.m[n].comp[d][i];
                        s += traj.grid.quad_weight(i) * diff * diff;
                    }
                row.time_derivative += s / dt;
            }
            row.diffusion = 0.5 * d2 * grad_sq_quadrature(traj.m[last]);
            row.activation =
                0.5 * e2 * quadrature(activation_density(traj.m[last], traj.p[last]));
            row.pressure = 0.5 * e2 * grad_sq_quadrature(traj.p[last]);
            row.metabolic = metabolic_quadrature(traj.m[last], params.gamma) /
                            (2.0 * params.gamma);
            row.initial = init2;
            row.lhs = row.time_derivative + row.diffusion + row.activation +
                      row.pressure + row.metabolic;
            row.rhs = row.initial;
            row.residual = rel_residual(row.lhs, row.rhs);
            report.second.push_back(row);
        }
    }
    return report;
}

namespace {

struct BallNodes {
    std::vector<std::size_t> idx;
    double measure = 0.0;
    bool clipped = false;
};

BallNodes ball_nodes(const Grid& g, std::array<double, 2> y, double r) {
    BallNodes ball;
    const double reff = r * (1.0 + 1e-12);
    for (int a = 0; a < g.dim(); ++a)
        if (y[a] - r < 0.0 || y[a] + r > g.extent(a)) ball.clipped = true;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto pos = g.position(i);
        double d2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) d2 += (pos[a] - y[a]) * (pos[a] - y[a]);
        if (d2 <= reff * reff) {
            ball.idx.push_back(i);
            ball.measure += g.quad_weight(i);
        }
    }
    if (ball.idx.empty()) throw EmptyBall("no grid node inside the ball");
    return ball;
}

struct TimeWindow {
    std::size_t first = 0, last = 0; // snapshot index range, inclusive
    std::vector<double> weights;     // trapezoid weights on the range
    bool clipped = false;
    double measure = 0.0;
};

TimeWindow time_window(const Trajectory& traj, double tau, double half_span) {
    TimeWindow win;
    const double t0 = tau - half_span, t1 = tau + half_span;
    if (t0 < 0.0 || t1 > traj.times.back()) win.clipped = true;
    const double tol = 1e-12 * std::max(1.0, std::abs(tau) + half_span);
    std::size_t first = traj.times.size(), last = 0;
    for (std::size_t n = 0; n < traj.times.size(); ++n)
        if (traj.times[n] >= t0 - tol && traj.times[n] <= t1 + tol) {
            first = std::min(first, n);
            last = std::max(last, n);
        }
    if (first > last || first == traj.times.size())
        throw InsufficientSnapshots("no stored snapshot in the time window");
    win.first = first;
    win.last = last;
    const std::size_t len = last - first + 1;
    win.weights.assign(len, 0.0);
    if (len == 1) {
        // lone snapshot: weigh it with the clipped window length (kept
        // positive so cylinder means stay defined on degenerate windows)
        win.weights[0] = std::max(
            std::min(t1, traj.times.back()) - std::max(t0, 0.0),
            std::numeric_limits<double>::min());
    } else {
        for (std::size_t n = 0; n + 1 < len; ++n) {
            const double half =
                0.5 * (traj.times[first + n + 1] - traj.times[first + n]);
            win.weights[n] += half;
            win.weights[n + 1] += half;
        }
    }
    for (double w : win.weights) win.measure += w;
    return win;
}

ExcessRow excess_row(const Trajectory& traj, std::array<double, 2> y, double tau,
                     double r, double beta) {
    const Grid& g = traj.grid;
    const int N = g.dim();
    const BallNodes ball = ball_nodes(g, y, r);
    const TimeWindow win = time_window(traj, tau, 0.5 * r * r);

    ExcessRow row;
    row.r = r;
    row.clipped = ball.clipped || win.clipped;

    // p_{y,r}(t) and A_r(z)
    double a_r = 0.0;
    for (std::size_t n = win.first; n <= win.last; ++n) {
        const ScalarField& p = traj.p[n];
        double mean = 0.0;
        for (std::size_t i : ball.idx) mean += g.quad_weight(i) * p[i];
        mean /= ball.measure;
        row.p_mean.emplace_back(traj.times[n], mean);
        double dev = 0.0;
        for (std::size_t i : ball.idx) {
            const double d = p[i] - mean;
            dev += g.quad_weight(i) * d * d;
        }
        a_r = std::max(a_r, dev);
    }
    row.A_r = a_r / std::pow(r, N);

    // m_{z,r} and the cylinder deviation integral
    row.m_mean.assign(static_cast<std::size_t>(N), 0.0);
    const double cyl_measure = ball.measure * win.measure;
    for (std::size_t n = win.first; n <= win.last; ++n) {
        const double tw = win.weights[n - win.first];
        for (int d = 0; d < N; ++d) {
            double s = 0.0;
            for (std::size_t i : ball.idx)
                s += g.quad_weight(i) * traj.m[n].comp[d][i];
            row.m_mean[static_cast<std::size_t>(d)] += tw * s;
        }
    }
    for (double& v : row.m_mean) v /= cyl_measure;

    double dev = 0.0;
    for (std::size_t n = win.first; n <= win.last; ++n) {
        const double tw = win.weights[n - win.first];
        double s = 0.0;
        for (std::size_t i : ball.idx) {
            double d2 = 0.0;
            for (int d = 0; d < N; ++d) {
                const double diff =
                    traj.m[n].comp[d][i] - row.m_mean[static_cast<std::size_t>(d)];
                d2 += diff * diff;
            }
            s += g.quad_weight(i) * d2;
        }
        dev += tw * s;
    }
    row.E_r = dev / std::pow(r, N + 2) + row.A_r + std::pow(r, 2.0 * beta);
    return row;
}

} // namespace

ExcessReport excess(const Trajectory& traj, std::array<double, 2> y, double tau,
                    const std::vector<double>& radii, double beta) {
    if (!(beta > 0.0)) throw DomainError("excess: beta must be positive");
    ExcessReport report;
    report.y = y;
    report.tau = tau;
    report.beta = beta;
    for (double r : radii) {
        if (!(r > 0.0)) throw DomainError("excess: radii must be positive");
        report.rows.push_back(excess_row(traj, y, tau, r, beta));
    }
    return report;
}

OscillationReport oscillation(const Trajectory& traj, std::array<double, 2> y,
                              const std::vector<double>& radii) {
    if (radii.size() < 3) throw DomainError("oscillation needs at least 3 radii");
    OscillationReport report;
    report.y = y;
    for (double r : radii) {
        const BallNodes ball = ball_nodes(traj.grid, y, r);
        double delta = 0.0;
        for (std::size_t n = 0; n < traj.snapshot_count(); ++n) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i : ball.idx) {
                lo = std::min(lo, traj.p[n][i]);
                hi = std::max(hi, traj.p[n][i]);
            }
            delta = std::max(delta, hi - lo);
        }
        report.radii.push_back(r);
        report.delta.push_back(delta);
    }

    report.fit_valid =
        std::all_of(report.delta.begin(), report.delta.end(),
                    [](double d) { return d > 0.0; });
    if (report.fit_valid) {
        // least squares of log delta against log r
        const std::size_t n = report.radii.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lx = std::log(report.radii[i]);
            const double ly = std::log(report.delta[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) < 1e-30) {
            report.fit_valid = false;
        } else {
            report.beta_hat = (n * sxy - sx * sy) / denom;
            report.fit_c = std::exp((sy - report.beta_hat * sx) / n);
        }
    }
    return report;
}

std::vector<ProbeRecord> regularity_scan(const Trajectory& traj,
                                         const std::vector<std::array<double, 3>>& probes,
                                         const std::vector<double>& radii,
                                         const ScanThresholds& thr, double beta) {
    const Grid& g = traj.grid;
    const int N = g.dim();
    std::vector<double> sorted_r = radii;
    std::sort(sorted_r.begin(), sorted_r.end()); // ascending: smallest first

    // |grad m|^2 per snapshot, shared across probes and radii
    std::vector<ScalarField> grad_sq;
    grad_sq.reserve(traj.snapshot_count());
    for (std::size_t n = 0; n < traj.snapshot_count(); ++n) {
        ScalarField gs(g);
        for (int c = 0; c < N; ++c) {
            const VectorField gm = gradient(traj.m[n].comp[c]);
            for (int d = 0; d < N; ++d)
                for (std::size_t i = 0; i < g.node_count(); ++i)
                    gs[i] += gm.comp[d][i] * gm.comp[d][i];
        }
        grad_sq.push_back(std::move(gs));
    }

    struct Raw {
        double min_excess = std::numeric_limits<double>::quiet_NaN();
        double max_mean = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> con1, con2; // aligned with usable radii, ascending
        bool usable = false;
    };
    std::vector<Raw> raw(probes.size());

    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const std::array<double, 2> y{probes[pi][0], N == 2 ? probes[pi][1] : 0.0};
        const double tau = probes[pi][2];
        Raw& rec = raw[pi];
        for (double r : sorted_r) {
            try {
                const ExcessRow row = excess_row(traj, y, tau, r, beta);
                double mag = 0.0;
                for (double v : row.m_mean) mag += v * v;
                mag = std::sqrt(mag);
                rec.min_excess = rec.usable ? std::min(rec.min_excess, row.E_r)
                                            : row.E_r;
                rec.max_mean = rec.usable ? std::max(rec.max_mean, mag) : mag;

                const BallNodes ball = ball_nodes(g, y, r);
                double con1 = 0.0, con2 = 0.0;
                for (std::size_t n = 0; n < traj.snapshot_count(); ++n) {
                    double mean2 = 0.0;
                    for (int d = 0; d < N; ++d) {
                        double s = 0.0;
                        for (std::size_t i : ball.idx)
                            s += g.quad_weight(i) * traj.m[n].comp[d][i];
                        s /= ball.measure;
                        mean2 += s * s;
                    }
                    con1 = std::max(con1, std::sqrt(mean2));
                    double gsq = 0.0;
                    for (std::size_t i : ball.idx)
                        gsq += g.quad_weight(i) * grad_sq[n][i];
                    con2 = std::max(con2, gsq / std::pow(r, N - 2));
                }
                rec.con1.push_back(con1);
                rec.con2.push_back(con2);
                rec.usable = true;
            } catch (const EmptyBall&) {
            } catch (const InsufficientSnapshots&) {
            }
        }
    }

    double excess_thr = thr.excess;
    if (excess_thr < 0.0) {
        std::vector<double> vals;
        for (const Raw& r : raw)
            if (r.usable) vals.push_back(r.min_excess);
        if (!vals.empty()) {
            std::sort(vals.begin(), vals.end());
            excess_thr = 10.0 * vals[vals.size() / 2];
        } else {
            excess_thr = std::numeric_limits<double>::infinity();
        }
    }

    std::vector<ProbeRecord> out;
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const Raw& rec = raw[pi];
        ProbeRecord r{};
        r.y = {probes[pi][0], N == 2 ? probes[pi][1] : 0.0};
        r.tau = probes[pi][2];
        r.singular = false;
        r.min_excess = rec.min_excess;
        r.max_mean = rec.max_mean;
        r.con1_smallest = r.con2_smallest = r.con1_ratio = r.con2_ratio =
            std::numeric_limits<double>::quiet_NaN();
        if (rec.usable && rec.con1.size() >= 2) {
            r.con1_smallest = rec.con1[0];
            r.con2_smallest = rec.con2[0];
            r.con1_ratio = rec.con1[1] > 0.0 ? rec.con1[0] / rec.con1[1]
                                             : (rec.con1[0] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
            r.con2_ratio = rec.con2[1] > 0.0 ? rec.con2[0] / rec.con2[1]
                                             : (rec.con2[0] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
            const bool growing = r.con1_ratio > thr.growth_ratio ||
                                 r.con2_ratio > thr.growth_ratio;
            r.singular = rec.min_excess > excess_thr && growing;
        }
        out.push_back(r);
    }
    return out;
}

DeGiorgiLevels degiorgi_levels(const Trajectory& traj, double k, int n_max) {
    if (!(k > 0.0)) throw DomainError("degiorgi_levels: k must be positive");
    if (traj.snapshot_count() == 0)
        throw InsufficientSnapshots("degiorgi_levels needs snapshots");
    DeGiorgiLevels out;
    out.k = k;
    out.M = 0.0;
    {
        const ScalarField m2 = magnitude_squared(traj.m[0]);
        for (double v : m2.values) out.M = std::max(out.M, v);
    }
    const std::size_t last = traj.snapshot_count() - 1;
    const std::vector<double> tw =
        last > 0 ? trapezoid_weights(traj.times, last) : std::vector<double>{1.0};

    std::vector<ScalarField> m2;
    m2.reserve(traj.snapshot_count());
    for (std::size_t n = 0; n < traj.snapshot_count(); ++n)
        m2.push_back(magnitude_squared(traj.m[n]));

    for (int n = 0; n <= n_max; ++n) {
        const double kn = k - k / std::pow(2.0, n) + out.M;
        double y = 0.0;
        for (std::size_t s = 0; s < m2.size(); ++s) {
            double area = 0.0;
            // strict inequality: zero data yields exactly zero measures
            for (std::size_t i = 0; i < m2[s].size(); ++i)
                if (m2[s][i] > kn) area += traj.grid.quad_weight(i);
            y += tw[s] * area;
        }
        out.thresholds.push_back(kn);
        out.y.push_back(y);
    }
    return out;
}

HolderEstimate holder_estimate(const std::vector<double>& times,
                               const std::vector<ScalarField>& fields,
                               const std::vector<double>& exponent_grid,
                               int sample_pairs, std::uint64_t seed) {
    if (fields.size() < 2 || times.size() != fields.size())
        throw InsufficientSnapshots("holder_estimate needs at least 2 snapshots");
    const Grid& g = fields[0].grid;
    std::mt19937_64 rng(seed);

    // sampled pairs: (value gap, parabolic distance)
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(2 * sample_pairs));
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 64 * static_cast<std::size_t>(sample_pairs);
    while (pairs.size() < static_cast<std::size_t>(2 * sample_pairs) &&
           attempts++ < attempt_cap) {
        const std::size_t n1 = rng() % fields.size();
        const std::size_t n2 = rng() % fields.size();
        const std::size_t i1 = rng() % g.node_count();
        const std::size_t i2 = rng() % g.node_count();
        const auto p1 = g.position(i1);
        const auto p2 = g.position(i2);
        double dx2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) dx2 += (p1[a] - p2[a]) * (p1[a] - p2[a]);
        const double dist =
            std::sqrt(dx2) + std::sqrt(std::abs(times[n1] - times[n2]));
        if (dist <= 0.0) continue;
        pairs.emplace_back(std::abs(fields[n1][i1] - fields[n2][i2]), dist);
    }

    HolderEstimate est;
    const std::size_t half_count = pairs.size() / 2;
    for (double beta : exponent_grid) {
        double half = 0.0, full = 0.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const double v = pairs[k].first / std::pow(pairs[k].second, beta);
            if (k < half_count) half = std::max(half, v);
            full = std::max(full, v);
        }
        est.table.push_back({beta, half, full});
        const bool stable = full <= 1.5 * half || full == 0.0;
        if (stable && beta >= est.beta_hat) {
            est.beta_hat = beta;
            est.seminorm = full;
        }
    }
    return est;
}

LpGrowthTable lp_growth(const Trajectory& traj, const std::vector<double>& exponents) {
    for (double n : exponents)
        if (n < 1.0) throw DomainError("lp_growth: exponents must be >= 1");
    LpGrowthTable table;
    table.times = traj.times;
    table.exponents = exponents;
    for (std::size_t s = 0; s < traj.snapshot_count(); ++s) {
        const ScalarField m2 = magnitude_squared(traj.m[s]);
        std::vector<double> row;
        for (double n : exponents) {
            double integral = 0.0;
            for (std::size_t i = 0; i < m2.size(); ++i)
                integral += traj.grid.quad_weight(i) * std::pow(m2[i], n);
            row.push_back(integral);
        }
        table.integral.push_back(std::move(row));
    }
    return table;
}

} // namespace netform
