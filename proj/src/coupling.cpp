#include "netform/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "netform/elliptic.hpp"
#include "netform/linalg.hpp"

namespace netform {

namespace {

long long step_count(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw DomainError("run: dt and t_end must be positive");
    return std::max(1ll, std::llround(t_end / dt));
}

StepConfig step_config(const RunConfig& cfg) {
    StepConfig s;
    s.dt = cfg.dt;
    s.eps_reg = cfg.eps_reg;
    s.reaction_mode = cfg.reaction_mode;
    s.cg_tol = cfg.cg_tol;
    return s;
}

} // namespace

Trajectory run_coupled(const PhysParams& params, const Grid& grid,
                       const RunConfig& cfg) {
    params.validate();
    if (params.m0.grid != grid) throw DomainError("run_coupled: m0 grid mismatch");
    const long long nsteps = step_count(cfg.t_end, cfg.dt);

    Trajectory traj(grid);
    VectorField m = params.m0;
    ScalarField p(grid);
    try {
        p = solve_pressure(m, params.S, cfg.cg_tol);
    } catch (const SolverDiverged&) {
        traj.status = RunStatus::solver_failed;
        traj.status_time = 0.0;
        return traj;
    }
    traj.times.push_back(0.0);
    traj.m.push_back(m);
    traj.p.push_back(p);

    const StepConfig scfg = step_config(cfg);
    for (long long k = 1; k <= nsteps; ++k) {
        const double t = k * cfg.dt;
        try {
            m = advance(m, p, params, scfg);
        } catch (const BlowUp&) {
            traj.status = RunStatus::blew_up;
            traj.status_time = t;
            return traj;
        } catch (const SolverDiverged&) {
            traj.status = RunStatus::solver_failed;
            traj.status_time = t;
            return traj;
        }
        const bool over = sup_norm(m) > cfg.blowup_threshold;
        try {
            p = solve_pressure(m, params.S, cfg.cg_tol, &p);
        } catch (const SolverDiverged&) {
            traj.status = over ? RunStatus::blew_up : RunStatus::solver_failed;
            traj.status_time = t;
            return traj;
        }
        if (over) {
            // keep the final finite state so diagnostics can see the spike
            traj.times.push_back(t);
            traj.m.push_back(m);
            traj.p.push_back(p);
            traj.status = RunStatus::blew_up;
            traj.status_time = t;
            return traj;
        }
        if (k % cfg.store_every == 0 || k == nsteps) {
            traj.times.push_back(t);
            traj.m.push_back(m);
            traj.p.push_back(p);
        }
    }
    return traj;
}

namespace {

// space-time trapezoid weight in time
double time_weight(long long n, long long nsteps, double dt) {
    return (n == 0 || n == nsteps) ? 0.5 * dt : dt;
}

double grad_sq_quadrature(const ScalarField& f) {
    const VectorField g = gradient(f);
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += inner(g.comp[d], g.comp[d]);
    return s;
}

double grad_sq_quadrature(const VectorField& v) {
    double s = 0.0;
    for (int c = 0; c < v.dim(); ++c) s += grad_sq_quadrature(v.comp[c]);
    return s;
}

double sup_grad_lq(const ScalarField& p, double q) {
    ScalarField gm = magnitude_squared(gradient(p));
    for (double& v : gm.values) v = std::sqrt(v);
    return quadrature_power_mean(gm, q);
}

} // namespace

std::pair<PicardTrace, Trajectory> run_picard(const PhysParams& params,
                                              const Grid& grid,
                                              const PicardConfig& cfg) {
    params.validate();
    if (params.m0.grid != grid) throw DomainError("run_picard: m0 grid mismatch");
    const long long nsteps = step_count(cfg.run.t_end, cfg.run.dt);
    const std::size_t ntimes = static_cast<std::size_t>(nsteps) + 1;
    const double dt = cfg.run.dt;
    const double q_grad = 2.0 * grid.dim();

    PicardTrace trace;
    auto record_iterate = [&](const std::vector<VectorField>& w,
                              const std::vector<ScalarField>& p) {
        double a = 0.0, b = 0.0;
        for (std::size_t n = 0; n < ntimes; ++n) {
            a = std::max(a, sup_norm(w[n]));
            b = std::max(b, sup_grad_lq(p[n], q_grad));
        }
        trace.a.push_back(a);
        trace.b.push_back(b);
        trace.d.push_back(a + b);
        trace.c0 = std::max(trace.c0, a + b);
    };

    // iterate 0: w_0 = m_0 frozen, p_0 from the anisotropic problem
    std::vector<VectorField> prev_w(ntimes, params.m0);
    std::vector<ScalarField> prev_p(ntimes, solve_pressure(params.m0, params.S,
                                                           cfg.run.cg_tol));
    record_iterate(prev_w, prev_p);

    // all p_k (k >= 1) solve plain Poisson problems: assemble once
    const EllipticOperator lap = assemble(VectorField(grid, 0.0));
    const std::size_t cap = 20 * lap.unknowns();

    StepConfig scfg = step_config(cfg.run);
    const ScalarField zero_p(grid);
    const double e2 = params.E * params.E;

    auto build_trajectory = [&](const std::vector<VectorField>& w,
                                const std::vector<ScalarField>& p,
                                RunStatus status, double status_time) {
        Trajectory traj(grid);
        traj.status = status;
        traj.status_time = status_time;
        for (std::size_t n = 0; n < ntimes; ++n) {
            const long long k = static_cast<long long>(n);
            if (k == 0 || k % cfg.run.store_every == 0 || k == nsteps) {
                traj.times.push_back(k * dt);
                traj.m.push_back(w[n]);
                traj.p.push_back(p[n]);
            }
        }
        return traj;
    };

    double eta1 = 0.0;
    int rising = 0;
    for (int k = 1; k <= cfg.k_max; ++k) {
        std::vector<VectorField> cur_w;
        std::vector<ScalarField> cur_p;
        cur_w.reserve(ntimes);
        cur_p.reserve(ntimes);

        // frozen coupling fields of the previous iterate, per time level
        std::vector<VectorField> forcing;
        forcing.reserve(ntimes);
        Eigen::VectorXd prev_level_p;
        for (std::size_t n = 0; n < ntimes; ++n) {
            const VectorField gp = gradient(prev_p[n]);
            ScalarField wg(grid);
            for (std::size_t i = 0; i < wg.size(); ++i) {
                double s = 0.0;
                for (int d = 0; d < grid.dim(); ++d)
                    s += prev_w[n].comp[d][i] * gp.comp[d][i];
                wg[i] = s;
            }
            // p_k RHS: S + div[(w . grad p) w]
            VectorField flux(grid);
            for (int d = 0; d < grid.dim(); ++d)
                for (std::size_t i = 0; i < wg.size(); ++i)
                    flux.comp[d][i] = wg[i] * prev_w[n].comp[d][i];
            ScalarField rhs = divergence(flux);
            for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += params.S[i];
            try {
                const Eigen::VectorXd x = pcg_solve(
                    lap.matrix(), lap.interior().restrict_interior(rhs),
                    cfg.run.cg_tol, cap,
                    prev_level_p.size() ? &prev_level_p : nullptr);
                prev_level_p = x;
                cur_p.push_back(lap.interior().extend_with_zero(grid, x));
            } catch (const SolverDiverged&) {
                return {trace, build_trajectory(prev_w, prev_p,
                                                RunStatus::solver_failed, n * dt)};
            }
            // w_k forcing: E^2 (w . grad p) grad p
            VectorField f(grid);
            for (int d = 0; d < grid.dim(); ++d)
                for (std::size_t i = 0; i < wg.size(); ++i)
                    f.comp[d][i] = e2 * wg[i] * gp.comp[d][i];
            forcing.push_back(std::move(f));
        }

        cur_w.push_back(params.m0);
        for (long long n = 1; n <= nsteps; ++n) {
            scfg.forcing = &forcing[static_cast<std::size_t>(n)];
            try {
                // zero pressure switches the own-state activation off; the
                // coupling enters only through the frozen forcing
                cur_w.push_back(advance(cur_w.back(), zero_p, params, scfg));
            } catch (const BlowUp&) {
                scfg.forcing = nullptr;
                return {trace, build_trajectory(prev_w, prev_p, RunStatus::blew_up,
                                                n * dt)};
            } catch (const SolverDiverged&) {
                scfg.forcing = nullptr;
                return {trace, build_trajectory(prev_w, prev_p,
                                                RunStatus::solver_failed, n * dt)};
            }
        }
        scfg.forcing = nullptr;

        record_iterate(cur_w, cur_p);
        double eta = 0.0;
        for (std::size_t n = 0; n < ntimes; ++n) {
            const double wt = time_weight(static_cast<long long>(n), nsteps, dt);
            VectorField dw(grid);
            for (int d = 0; d < grid.dim(); ++d)
                for (std::size_t i = 0; i < grid.node_count(); ++i)
                    dw.comp[d][i] = cur_w[n].comp[d][i] - prev_w[n].comp[d][i];
            ScalarField dp(grid);
            for (std::size_t i = 0; i < grid.node_count(); ++i)
                dp[i] = cur_p[n][i] - prev_p[n][i];
            eta += wt * (grad_sq_quadrature(dw) + grad_sq_quadrature(dp));
        }
        if (!trace.eta.empty() && trace.eta.back() > 0.0) {
            rising = (eta / trace.eta.back() >= 1.0) ? rising + 1 : 0;
            if (rising >= 3) trace.non_contracting = true;
        }
        trace.eta.push_back(eta);
        prev_w = std::move(cur_w);
        prev_p = std::move(cur_p);

        if (k == 1) {
            eta1 = eta;
            if (eta1 == 0.0) break; // exact fixed point (zero data)
        } else if (eta < cfg.tol * eta1) {
            break;
        }
    }
    return {trace, build_trajectory(prev_w, prev_p, RunStatus::completed, 0.0)};
}

std::vector<SweepRow> lifespan_sweep(const PhysParams& params, const Grid& grid,
                                     const RunConfig& cfg, double t_target,
                                     std::vector<double> scales,
                                     const SweepOptions& opts) {
    params.validate();
    if (!(t_target > 0.0)) throw DomainError("lifespan_sweep: t_target must be positive");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 0.0) throw DomainError("lifespan_sweep: scales must be nonnegative");
        if (i > 0 && scales[i] > scales[i - 1])
            throw DomainError("lifespan_sweep: scales must be sorted descending");
    }

    const double smallness_base =
        sup_norm(params.m0) +
        quadrature_power_mean(params.S, 2.0 * grid.dim() / 3.0);

    RunConfig run_cfg = cfg;
    run_cfg.t_end = t_target;
    auto run_scale = [&](double s) {
        PhysParams scaled = params;
        for (double& v : scaled.S.values) v *= s;
        for (int d = 0; d < scaled.m0.dim(); ++d)
            for (double& v : scaled.m0.comp[d].values) v *= s;
        const Trajectory traj = run_coupled(scaled, grid, run_cfg);
        SweepRow row;
        row.scale = s;
        row.smallness = s * smallness_base;
        row.status = traj.status;
        row.survival_time =
            traj.status == RunStatus::completed ? t_target : traj.status_time;
        return row;
    };

    std::vector<SweepRow> rows(scales.size());
    std::size_t nw = opts.workers > 0
                         ? static_cast<std::size_t>(opts.workers)
                         : std::max(1u, std::thread::hardware_concurrency());
    nw = std::min(nw, std::max<std::size_t>(1, scales.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scales.size()) return;
            rows[i] = run_scale(scales[i]);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (opts.bisect) {
        double lo = 0.0, hi = 0.0; // largest surviving / smallest failing
        bool have_lo = false, have_hi = false;
        for (const SweepRow& r : rows) {
            if (r.status == RunStatus::completed) {
                if (!have_lo || r.scale > lo) lo = r.scale, have_lo = true;
            } else {
                if (!have_hi || r.scale < hi) hi = r.scale, have_hi = true;
            }
        }
        if (have_lo && have_hi && lo < hi) {
            for (int i = 0; i < opts.bisect_steps; ++i) {
                const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
                const SweepRow row = run_scale(mid);
                rows.push_back(row);
                (row.status == RunStatus::completed ? lo : hi) = mid;
            }
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.scale > b.scale; });
    return rows;
}

} // namespace netform
