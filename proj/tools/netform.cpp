// Command-line driver: run / picard / diagnose / sweep / lemma-check.
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 blow-up detected
// (the sweep always exits 0: blow-up is data there). Messages go to stderr,
// results to files and stdout only.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "netform/analysis.hpp"
#include "netform/config.hpp"
#include "netform/diagnostics.hpp"
#include "netform/reports.hpp"
#include "netform/snapshot.hpp"

namespace {

using namespace netform;

int status_exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return 0;
        case RunStatus::solver_failed: return 3;
        case RunStatus::blew_up: return 4;
    }
    return 1;
}

std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

const char* status_text(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blew_up: return "blew_up";
        case RunStatus::solver_failed: return "solver_failed";
    }
    return "unknown";
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const Grid grid = make_grid(cfg);
    const PhysParams params = make_params(cfg, grid);
    const Trajectory traj = run_coupled(params, grid, make_run_config(cfg));
    write_trajectory(ensure_dir(out_dir).string(), traj);
    std::cout << "status=" << status_text(traj.status)
              << " snapshots=" << traj.snapshot_count();
    if (traj.status != RunStatus::completed)
        std::cout << " t=" << format_g17(traj.status_time);
    else if (!traj.times.empty())
        std::cout << " t=" << format_g17(traj.times.back());
    std::cout << '\n';
    return status_exit_code(traj.status);
}

int cmd_picard(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const Grid grid = make_grid(cfg);
    const PhysParams params = make_params(cfg, grid);
    PicardConfig pc;
    pc.run = make_run_config(cfg);
    pc.k_max = cfg.k_max;
    pc.tol = cfg.picard_tol;
    const auto [trace, traj] = run_picard(params, grid, pc);
    const auto out = ensure_dir(out_dir);
    write_picard_csv((out / "picard_trace.csv").string(), trace);
    write_trajectory((out / "final_iterate").string(), traj);
    std::cout << "status=" << status_text(traj.status)
              << " iterates=" << trace.iterates()
              << " non_contracting=" << (trace.non_contracting ? 1 : 0);
    if (trace.iterates() >= 3) {
        const PicardInterpretation pi = interpret_picard(trace);
        std::cout << " contraction_ratio=" << format_g17(pi.contraction_ratio)
                  << " plateau_ok=" << (pi.plateau_ok ? 1 : 0);
    }
    std::cout << '\n';
    return status_exit_code(traj.status);
}

int cmd_diagnose(const std::string& config_path, const std::string& traj_dir,
                 const std::string& out_dir) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const Trajectory traj = read_trajectory(traj_dir);
    if (traj.grid != make_grid(cfg))
        throw ValidationError("grid", "config grid does not match the trajectory");
    const PhysParams params = make_params(cfg, traj.grid);
    const auto out = ensure_dir(out_dir);

    const EnergyReport energy = energy_report(traj, params, cfg.checkpoints, true);
    write_energy_csv((out / "energy.csv").string(), energy);
    write_energy_second_csv((out / "energy_second.csv").string(), energy);

    std::vector<ExcessReport> excess_reports;
    std::vector<OscillationReport> oscillation_reports;
    for (const auto& probe : cfg.probes) {
        const std::array<double, 2> y{probe[0], probe[1]};
        excess_reports.push_back(excess(traj, y, probe[2], cfg.radii, cfg.beta));
        oscillation_reports.push_back(oscillation(traj, y, cfg.radii));
    }
    write_excess_csv((out / "excess.csv").string(), excess_reports, traj.grid.dim());
    write_oscillation_csv((out / "oscillation.csv").string(), oscillation_reports,
                          traj.grid.dim());

    ScanThresholds thr;
    thr.excess = cfg.excess_threshold;
    thr.growth_ratio = cfg.growth_ratio;
    write_regularity_csv(
        (out / "regularity.csv").string(),
        regularity_scan(traj, cfg.probes, cfg.radii, thr, cfg.beta),
        traj.grid.dim());

    double k = cfg.degiorgi_k;
    if (k <= 0.0) {
        for (const VectorField& m : traj.m)
            k = std::max(k, sup_norm(magnitude_squared(m)));
        if (k <= 0.0) k = 1.0; // zero trajectory: any level works
    }
    write_levels_csv((out / "levels.csv").string(), degiorgi_levels(traj, k),
                     traj.grid.dim());

    write_lp_csv((out / "lp.csv").string(), lp_growth(traj, cfg.lp_exponents));

    const HolderEstimate holder = holder_estimate(
        traj.times, traj.p, cfg.holder_exponents, 4096, cfg.seed);
    std::cout << "holder_beta=" << format_g17(holder.beta_hat)
              << " holder_seminorm=" << format_g17(holder.seminorm) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int workers_flag) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const Grid grid = make_grid(cfg);
    const PhysParams params = make_params(cfg, grid);
    SweepOptions opts;
    opts.bisect = cfg.bisect;
    opts.workers = workers_flag > 0 ? workers_flag : cfg.workers;
    const auto rows = lifespan_sweep(params, grid, make_run_config(cfg),
                                     cfg.t_target, cfg.sweep_scales, opts);
    write_sweep_csv((ensure_dir(out_dir) / "sweep.csv").string(), rows);
    for (const SweepRow& r : rows)
        std::cout << "scale=" << format_g17(r.scale)
                  << " survival=" << format_g17(r.survival_time) << " "
                  << status_text(r.status) << '\n';
    return 0; // blow-up is data here
}

int cmd_lemma_ynb(double c, double b, double alpha, double y0, int n) {
    const GeometricRecursion rec{c, b, alpha};
    std::cout << "threshold = " << format_g17(ynb_threshold(rec)) << '\n';
    const YnbSequence seq = ynb_iterate(rec, y0, n);
    for (std::size_t i = 0; i < seq.y.size(); ++i)
        std::cout << "y_" << i << " = " << format_g17(seq.y[i]) << '\n';
    if (seq.overflow) std::cout << "overflow" << '\n';
    return 0;
}

int cmd_lemma_small(double b0, double lambda, double alpha, int k) {
    const PerturbedRecursion rec{b0, lambda, alpha};
    const SmallCheck chk = small_check(rec);
    std::cout << "applies = " << (chk.applies ? "true" : "false") << '\n';
    if (chk.applies) std::cout << "bound = " << format_g17(chk.bound) << '\n';
    for (const double v : perturbed_iterate(rec, k))
        std::cout << format_g17(v) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netform: coupled elliptic-parabolic network formation lab"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", traj_dir;
    int workers = 0;

    auto* run = app.add_subcommand("run", "time-march the coupled system");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* picard = app.add_subcommand("picard", "successive-approximation scheme");
    picard->add_option("--config", config_path, "config file")->required();
    picard->add_option("--out", out_dir, "output directory");

    auto* diagnose = app.add_subcommand("diagnose", "analyze a stored trajectory");
    diagnose->add_option("--config", config_path, "config file")->required();
    diagnose->add_option("--traj", traj_dir, "trajectory directory")->required();
    diagnose->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "life-span sweep over data scales");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--workers", workers, "concurrent runs (default: cores)");

    auto* lemma = app.add_subcommand("lemma-check", "recursion lemma utilities");
    lemma->require_subcommand(1);
    double c = 1.0, b = 2.0, alpha = 1.0, y0 = 0.0, b0 = 0.0, lambda = 1.0;
    int n_iter = 30, k_iter = 100;
    auto* ynb = lemma->add_subcommand("ynb", "superlinear recursion y_{n+1}=c b^n y_n^{1+a}");
    ynb->add_option("--c", c)->required();
    ynb->add_option("--b", b)->required();
    ynb->add_option("--alpha", alpha)->required();
    ynb->add_option("--y0", y0)->required();
    ynb->add_option("--n", n_iter);
    auto* small = lemma->add_subcommand("small", "perturbed recursion b_k=b_0+l b_{k-1}^{1+a}");
    small->add_option("--b0", b0)->required();
    small->add_option("--lambda", lambda)->required();
    small->add_option("--alpha", alpha);
    small->add_option("--k", k_iter);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir);
        if (*picard) return cmd_picard(config_path, out_dir);
        if (*diagnose) return cmd_diagnose(config_path, traj_dir, out_dir);
        if (*sweep) return cmd_sweep(config_path, out_dir, workers);
        if (*ynb) return cmd_lemma_ynb(c, b, alpha, y0, n_iter);
        if (*small) return cmd_lemma_small(b0, lambda, alpha, k_iter);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 2;
    } catch (const SolverDiverged& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const BlowUp& e) {
        std::cerr << "blow-up: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
