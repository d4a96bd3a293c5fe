// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. With no arguments all criteria run; otherwise the listed ones.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "netform/analysis.hpp"
#include "netform/config.hpp"
#include "netform/diagnostics.hpp"
#include "netform/elliptic.hpp"
#include "netform/reports.hpp"
#include "netform/snapshot.hpp"

using namespace netform;

namespace {

struct Criterion {
    int id;
    const char* label;
    bool (*body)(std::string& detail);
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

double manufactured_source(double x, double y) {
    const double sx = std::sin(M_PI * x), cx = std::cos(M_PI * x);
    const double sy = std::sin(M_PI * y), cy = std::cos(M_PI * y);
    const double pi = M_PI;
    return pi * pi * (2.0 + x * x * y * y + (x - y) * (x - y)) * sx * sy -
           pi * (2.0 * x * y * y + x * x - 2.0 * x * y) * cx * sy -
           pi * (2.0 * x * y - y * y - 2.0 * x + 2.0 * y) * sx * cy -
           2.0 * pi * pi * x * y * (x - y) * cx * cy;
}

bool criterion_elliptic_convergence(std::string& detail) {
    const double t0 = now_seconds();
    std::vector<double> errs;
    for (int n : {17, 33, 65}) {
        const Grid g = Grid::rectangle(n, n);
        const VectorField m = sample_vector(g, [](double x, double y) {
            return std::array<double, 2>{x * y, x - y};
        });
        const ScalarField S = sample(g, manufactured_source);
        const ScalarField p = solve_pressure(m, S, 1e-12);
        double err = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto pos = g.position(i);
            err = std::max(err, std::abs(p[i] - std::sin(M_PI * pos[0]) *
                                                    std::sin(M_PI * pos[1])));
        }
        errs.push_back(err);
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << "orders " << o1 << ", " << o2 << "; " << elapsed << " s";
    detail = os.str();
    return o1 >= 1.8 && o2 >= 1.8 && elapsed < 10.0;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_ellipticity_sandwich(std::string& detail) {
    std::mt19937_64 rng(2024);
    const Grid g = Grid::rectangle(16, 16);
    double worst_lo = 1e30, worst_hi_margin = 1e30;
    for (int trial = 0; trial < 20; ++trial) {
        VectorField m(g);
        for (int d = 0; d < 2; ++d)
            for (std::size_t i = 0; i < g.node_count(); ++i)
                m.comp[d][i] = uniform(rng, -1.0, 1.0);
        const EllipticOperator op = assemble(m);
        const double max_m2 = sup_norm(magnitude_squared(m));
        const auto [lo, hi] = rayleigh_bounds(op, m, 100, rng());
        worst_lo = std::min(worst_lo, lo);
        worst_hi_margin = std::min(worst_hi_margin, 1.0 + max_m2 + 1e-8 - hi);
        if (lo < 1.0 - 1e-8 || hi > 1.0 + max_m2 + 1e-8) {
            detail = "rayleigh quotient escaped the sandwich";
            return false;
        }
        const Eigen::MatrixXd M(op.matrix());
        const Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) {
            detail = "cholesky failed";
            return false;
        }
        const Eigen::MatrixXd L = llt.matrixL();
        if (L.diagonal().minCoeff() <= 0.0) {
            detail = "nonpositive cholesky pivot";
            return false;
        }
    }
    std::ostringstream os;
    os << "min quotient " << worst_lo << ", min upper margin " << worst_hi_margin;
    detail = os.str();
    return true;
}

// ---------------------------------------------------------------- criterion 3

PhysParams smooth_small_data(const Grid& g, bool zero_source) {
    ScalarField S = zero_source
                        ? ScalarField(g, 0.0)
                        : sample(g, [](double x, double y) {
                              const double dx = x - 0.5, dy = y - 0.5;
                              return 0.2 * std::exp(-(dx * dx + dy * dy) /
                                                    (2.0 * 0.15 * 0.15));
                          });
    // fundamental-mode initial conductance: zero on the boundary and free of
    // boundary kinks, so the residual is dominated by the O(dt) part
    VectorField m0 = sample_vector(g, [](double x, double y) {
        const double s = std::sin(M_PI * x) * std::sin(M_PI * y);
        return std::array<double, 2>{0.3 * s, 0.2 * s};
    });
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.on_boundary(i))
            for (int d = 0; d < g.dim(); ++d) m0.comp[d][i] = 0.0;
    PhysParams params(std::move(S), std::move(m0));
    params.D = 1.0;
    params.E = 1.0;
    params.gamma = 1.0;
    return params;
}

double energy_residual(int n, double dt, bool zero_source) {
    const Grid g = Grid::rectangle(n, n);
    const PhysParams params = smooth_small_data(g, zero_source);
    RunConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    const Trajectory traj = run_coupled(params, g, cfg);
    const EnergyReport rep = energy_report(traj, params, {1.0});
    return rep.rows[0].residual;
}

bool criterion_energy_identity(std::string& detail) {
    // baseline within 5%, refined (dt/2, h/2) within half the 5% budget
    const double t0 = now_seconds();
    std::ostringstream os;
    bool ok = true;
    for (bool zero_source : {true, false}) {
        const double base = energy_residual(65, 0.004, zero_source);
        const double refined = energy_residual(129, 0.002, zero_source);
        os << (zero_source ? "S=0: " : "small-data: ") << base << " -> "
           << refined << "; ";
        ok = ok && base <= 0.05 && refined <= 0.025;
    }
    const double elapsed = now_seconds() - t0;
    os << elapsed << " s";
    detail = os.str();
    return ok && elapsed < 60.0;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_monotonicity_gap(std::string& detail) {
    const double t0 = now_seconds();
    std::mt19937_64 rng(77);
    double worst = 1e30;
    for (int trial = 0; trial < 100000; ++trial) {
        const std::size_t dim = 1 + rng() % 3;
        std::vector<double> x(dim), y(dim);
        double nx = 0.0, ny = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            x[i] = uniform(rng, -3.0, 3.0);
            y[i] = uniform(rng, -3.0, 3.0);
            nx += x[i] * x[i];
            ny += y[i] * y[i];
        }
        const double gamma = uniform(rng, 0.6, 3.0);
        const double scale =
            std::pow(1.0 + std::sqrt(nx) + std::sqrt(ny), 2.0 * gamma);
        const double gap = monotonicity_gap(x, y, gamma) / scale;
        worst = std::min(worst, gap);
        if (gap < -1e-12) break;
    }
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << "worst scaled gap " << worst << "; " << elapsed << " s";
    detail = os.str();
    return worst >= -1e-12 && elapsed < 5.0;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_recursion_lemmas(std::string& detail) {
    const double t0 = now_seconds();
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 1000; ++trial) {
        const GeometricRecursion rec{uniform(rng, 0.1, 10.0),
                                     uniform(rng, 1.001, 5.0),
                                     uniform(rng, 0.2, 3.0)};
        const double y0 = ynb_threshold(rec) * uniform(rng, 0.05, 1.0);
        const YnbSequence seq = ynb_iterate(rec, y0, 200);
        if (seq.overflow) {
            detail = "below-threshold sequence overflowed";
            return false;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < seq.y.size(); ++i)
            monotone = monotone && seq.y[i] <= seq.y[i - 1] * (1.0 + 1e-12);
        if (!(seq.y.back() < 1e-8 * std::max(y0, 1e-300) || monotone)) {
            detail = "below-threshold sequence neither vanished nor decayed";
            return false;
        }
    }
    int applying = 0;
    while (applying < 1000) {
        const PerturbedRecursion rec{uniform(rng, 0.0, 1.0),
                                     uniform(rng, 0.01, 2.0),
                                     uniform(rng, 0.2, 3.0)};
        const SmallCheck chk = small_check(rec);
        if (!chk.applies) continue;
        ++applying;
        if (chk.bound > 2.0 * rec.b0 * (1.0 + 1e-12)) {
            detail = "bound exceeded 2 b0";
            return false;
        }
        const std::vector<double> b = perturbed_iterate(rec, 100);
        for (double v : b)
            if (v > chk.bound * (1.0 + 1e-12)) {
                detail = "iterate escaped the bound";
                return false;
            }
    }
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << "1000 draws each; " << elapsed << " s";
    detail = os.str();
    return elapsed < 5.0;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_picard_contraction(std::string& detail) {
    const double t0 = now_seconds();
    const Grid g = Grid::line(129);
    PicardConfig pc;
    pc.run.dt = 1.0 / 128.0;
    pc.run.t_end = 1.0;
    pc.k_max = 7;
    pc.tol = 0.0; // run all iterates
    for (double scale = 1.0; scale >= 1.0 / 64.0; scale *= 0.5) {
        ScalarField S = sample(g, [&](double x) {
            const double dx = x - 0.5;
            return scale * std::exp(-dx * dx / (2.0 * 0.15 * 0.15));
        });
        VectorField m0(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double dx = g.position(i)[0] - 0.5;
            m0.comp[0][i] =
                g.on_boundary(i)
                    ? 0.0
                    : scale * std::exp(-dx * dx / (2.0 * 0.15 * 0.15));
        }
        PhysParams params(std::move(S), std::move(m0));
        const auto [trace, traj] = run_picard(params, g, pc);
        if (trace.eta.size() < 7) continue;
        bool contracting = true;
        for (std::size_t k = 2; k <= 6; ++k)
            contracting = contracting && trace.eta[k] / trace.eta[k - 1] <= 0.9;
        const double plateau = *std::max_element(trace.d.begin(), trace.d.end());
        const bool plateau_ok = plateau <= 2.0 * (trace.d[0] + trace.d[1]);
        if (contracting && plateau_ok) {
            const double elapsed = now_seconds() - t0;
            std::ostringstream os;
            os << "scale " << scale << ", max ratio ";
            double worst = 0.0;
            for (std::size_t k = 2; k <= 6; ++k)
                worst = std::max(worst, trace.eta[k] / trace.eta[k - 1]);
            os << worst << "; " << elapsed << " s";
            detail = os.str();
            return elapsed < 120.0;
        }
    }
    detail = "no contracting scale found";
    return false;
}

// ---------------------------------------------------------------- criterion 7

bool criterion_lifespan_monotonicity(std::string& detail) {
    const double t0 = now_seconds();
    const Grid g = Grid::line(65);
    ScalarField S = sample(g, [](double x) {
        const double dx = x - 0.5;
        return std::exp(-dx * dx / (2.0 * 0.1 * 0.1));
    });
    VectorField m0(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double dx = g.position(i)[0] - 0.5;
        m0.comp[0][i] = g.on_boundary(i)
                            ? 0.0
                            : 0.001 * std::exp(-dx * dx / (2.0 * 0.1 * 0.1));
    }
    PhysParams params(std::move(S), std::move(m0));
    params.D = 0.2;
    params.E = 2.0;

    RunConfig cfg;
    cfg.dt = 0.005;
    cfg.blowup_threshold = 50.0; // exit from the bounded small-data regime
    const double t_target = 8.0;
    const std::vector<double> scales = {2048, 1024, 896, 832, 768, 512};
    const auto rows = lifespan_sweep(params, g, cfg, t_target, scales);

    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i].survival_time >= rows[i - 1].survival_time;
    const bool smallest_survives =
        rows.back().status == RunStatus::completed &&
        rows.back().survival_time == t_target;
    const bool some_blowup =
        std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
            return r.status == RunStatus::blew_up;
        });
    const double elapsed = now_seconds() - t0;
    std::ostringstream os;
    os << "survival:";
    for (const auto& r : rows) os << ' ' << r.survival_time;
    os << "; " << elapsed << " s";
    detail = os.str();
    return monotone && smallest_survives && some_blowup && elapsed < 600.0;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_diagnostics_exactness(std::string& detail) {
    // constant synthetic trajectory: excess reduces to r^(2 beta)
    const Grid g = Grid::line(129); // h = 1/128, dyadic radii hit nodes exactly
    Trajectory traj(g);
    for (int s = 0; s < 3; ++s) {
        traj.times.push_back(0.5 * s);
        traj.m.push_back(VectorField(g, 0.7));
        traj.p.push_back(ScalarField(g, 1.0 + 0.25 * s));
    }
    const double beta = 0.5;
    const ExcessReport rep =
        excess(traj, {0.5, 0.0}, 0.5, {0.25, 0.125, 0.0625}, beta);
    for (const ExcessRow& row : rep.rows)
        if (std::abs(row.E_r - std::pow(row.r, 2.0 * beta)) > 1e-14) {
            detail = "excess not exactly r^(2 beta)";
            return false;
        }

    // affine pressure: delta_r = 2r exactly on dyadic balls
    Trajectory affine(g);
    affine.times.push_back(0.0);
    affine.m.push_back(VectorField(g, 0.0));
    affine.p.push_back(sample(g, [](double x) { return x; }));
    const OscillationReport osc =
        oscillation(affine, {0.5, 0.0}, {0.125, 0.25, 0.375});
    for (std::size_t i = 0; i < osc.radii.size(); ++i)
        if (std::abs(osc.delta[i] - 2.0 * osc.radii[i]) > 1e-14) {
            detail = "oscillation not exactly 2r";
            return false;
        }

    // zero trajectory: every De Giorgi level measure vanishes
    Trajectory zero(g);
    for (int s = 0; s < 3; ++s) {
        zero.times.push_back(0.5 * s);
        zero.m.push_back(VectorField(g, 0.0));
        zero.p.push_back(ScalarField(g, 0.0));
    }
    const DeGiorgiLevels levels = degiorgi_levels(zero, 1.0);
    for (double y : levels.y)
        if (std::abs(y) > 1e-14) {
            detail = "zero trajectory has nonzero level measure";
            return false;
        }
    detail = "excess, oscillation, levels all exact";
    return true;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_degiorgi_decay(std::string& detail) {
    // strong enough activation that |m|^2 transiently exceeds its initial sup,
    // so the level-set sequence starts strictly positive before collapsing
    const Grid g = Grid::line(65);
    ScalarField S = sample(g, [](double x) {
        const double dx = x - 0.5;
        return 2.0 * std::exp(-dx * dx / (2.0 * 0.15 * 0.15));
    });
    VectorField m0(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const double dx = g.position(i)[0] - 0.5;
        m0.comp[0][i] = g.on_boundary(i)
                            ? 0.0
                            : 0.05 * std::exp(-dx * dx / (2.0 * 0.15 * 0.15));
    }
    PhysParams params(std::move(S), std::move(m0));
    params.D = 0.2;
    params.E = 5.0;
    RunConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 3.0; // long enough for the conductance to outgrow its seed

    const Trajectory traj = run_coupled(params, g, cfg);
    if (traj.status != RunStatus::completed) {
        detail = "run did not complete";
        return false;
    }
    double k = 0.0;
    for (const VectorField& m : traj.m)
        k = std::max(k, sup_norm(magnitude_squared(m)));
    const DeGiorgiLevels levels = degiorgi_levels(traj, k);

    bool nonincreasing = true;
    for (std::size_t n = 1; n < levels.y.size(); ++n)
        nonincreasing = nonincreasing && levels.y[n] <= levels.y[n - 1] + 1e-15;
    std::size_t first_zero = levels.y.size();
    for (std::size_t n = 0; n < levels.y.size(); ++n)
        if (levels.y[n] == 0.0) {
            first_zero = n;
            break;
        }
    const double expo = 1.0 + 2.0 / g.dim();
    bool ratios_finite = true;
    for (std::size_t n = 0; n + 1 < levels.y.size(); ++n)
        if (levels.y[n] > 0.0)
            ratios_finite = ratios_finite &&
                            std::isfinite(levels.y[n + 1] / std::pow(levels.y[n], expo));
    std::ostringstream os;
    os << "y_0 " << levels.y[0] << ", zero from n = " << first_zero;
    detail = os.str();
    return nonincreasing && first_zero < levels.y.size() && ratios_finite &&
           levels.y[0] > 0.0;
}

// --------------------------------------------------------------- criterion 10

#ifndef NETFORM_CLI_PATH
#define NETFORM_CLI_PATH "netform"
#endif

int run_cmd(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "netform_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg = base / "exp.cfg";
    {
        std::ofstream out(cfg);
        out << "mode = run\nseed = 7\n\n[grid]\ndim = 1\nn = 65\n\n"
               "[params]\nsource = gaussian(0.5, 0.1, 0.5)\n"
               "m0 = bump_vector(0.5, 0.1, 0.4)\n\n"
               "[stepping]\ndt = 0.01\nt_end = 0.5\n\n"
               "[diagnostics]\ncheckpoints = 0.5\nprobes = 0.5 0.25\n"
               "radii = 0.25 0.125 0.0625\n";
    }
    const std::string cli = NETFORM_CLI_PATH;
    for (const char* leg : {"a", "b"}) {
        const fs::path traj = base / (std::string("traj_") + leg);
        const fs::path diag = base / (std::string("diag_") + leg);
        if (run_cmd(cli + " run --config " + cfg.string() + " --out " +
                    traj.string() + " > /dev/null 2>&1") != 0) {
            detail = "run failed";
            return false;
        }
        if (run_cmd(cli + " diagnose --config " + cfg.string() + " --traj " +
                    traj.string() + " --out " + diag.string() +
                    " > /dev/null 2>&1") != 0) {
            detail = "diagnose failed";
            return false;
        }
    }
    // byte-identical outputs
    for (const auto& e : fs::directory_iterator(base / "traj_a")) {
        if (slurp(e.path()) != slurp(base / "traj_b" / e.path().filename())) {
            detail = "trajectory bytes differ";
            return false;
        }
    }
    for (const auto& e : fs::directory_iterator(base / "diag_a")) {
        if (slurp(e.path()) != slurp(base / "diag_b" / e.path().filename())) {
            detail = "report bytes differ";
            return false;
        }
    }

    // snapshot round trips, bit-exact
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const bool two_d = trial % 2 == 0;
        const Grid g = two_d ? Grid::rectangle(5 + trial % 7, 4 + trial % 5, 1.5, 0.5)
                             : Grid::line(5 + trial % 13, 2.0);
        VectorField m(g);
        ScalarField p(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            p[i] = uniform(rng, -1e6, 1e6);
            for (int d = 0; d < g.dim(); ++d)
                m.comp[d][i] = uniform(rng, -1e6, 1e6);
        }
        const double t = uniform(rng, 0.0, 10.0);
        const std::string path = (base / "roundtrip.nwf").string();
        write_snapshot(path, m, p, t);
        const Snapshot s = read_snapshot(path);
        if (s.time != t || s.grid != g || s.p.values != p.values) {
            detail = "snapshot round trip not bit-exact";
            return false;
        }
        for (int d = 0; d < g.dim(); ++d)
            if (s.m.comp[d].values != m.comp[d].values) {
                detail = "snapshot round trip not bit-exact";
                return false;
            }
    }
    detail = "byte-identical reruns; 100 bit-exact round trips";
    return true;
}

const Criterion kCriteria[] = {
    {1, "manufactured-solution convergence (elliptic)", criterion_elliptic_convergence},
    {2, "ellipticity sandwich", criterion_ellipticity_sandwich},
    {3, "energy identity", criterion_energy_identity},
    {4, "vector monotonicity property suite", criterion_monotonicity_gap},
    {5, "recursion lemma property suites", criterion_recursion_lemmas},
    {6, "successive-approximation contraction", criterion_picard_contraction},
    {7, "life-span monotonicity", criterion_lifespan_monotonicity},
    {8, "diagnostics exactness", criterion_diagnostics_exactness},
    {9, "level-set decay", criterion_degiorgi_decay},
    {10, "determinism and round-trip", criterion_determinism},
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));
    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", c.id,
                    c.label, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
