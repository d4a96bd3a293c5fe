#include "netform/parabolic.hpp"

#include <cmath>

#include "netform/linalg.hpp"

namespace netform {

void PhysParams::validate() const {
    if (!(D > 0.0)) throw DomainError("PhysParams: D must be positive");
    if (!(E > 0.0)) throw DomainError("PhysParams: E must be positive");
    if (!(gamma > 0.5)) throw DomainError("PhysParams: gamma must be > 0.5");
    if (S.grid != m0.grid) throw DomainError("PhysParams: S and m0 grids differ");
    for (std::size_t i = 0; i < m0.grid.node_count(); ++i)
        if (m0.grid.on_boundary(i))
            for (int d = 0; d < m0.dim(); ++d)
                if (m0.comp[d][i] != 0.0)
                    throw DomainError("PhysParams: m0 must vanish on the boundary");
}

VectorField advance(const VectorField& m, const ScalarField& p,
                    const PhysParams& params, const StepConfig& cfg) {
    const Grid& g = m.grid;
    if (p.grid != g) throw DomainError("advance: grid mismatch");
    if (!(cfg.dt > 0.0)) throw DomainError("advance: dt must be positive");

    const double dt = cfg.dt;
    const double eps = params.gamma >= 1.0 ? 0.0 : cfg.eps_reg;
    const InteriorMap map(g);

    // reaction coefficient rho = (|m|^2 + eps)^(gamma-1) at the old state
    const ScalarField msq = magnitude_squared(m);
    std::vector<double> rho(g.node_count());
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::pow(msq[i] + eps, params.gamma - 1.0);

    // activation E^2 (m . grad p) grad p at the old state
    const VectorField gp = gradient(p);
    ScalarField mdg(g);
    for (std::size_t i = 0; i < mdg.size(); ++i) {
        double s = 0.0;
        for (int d = 0; d < m.dim(); ++d) s += m.comp[d][i] * gp.comp[d][i];
        mdg[i] = s;
    }

    // Helmholtz matrix (I + dt D^2 (-Lap) + dt diag(rho)) over interior nodes,
    // shared by all components
    const int nx = g.n(0);
    const int ny = g.dim() == 2 ? g.n(1) : 1;
    const double cx = cfg.disable_diffusion ? 0.0
                                            : dt * params.D * params.D / (g.h(0) * g.h(0));
    const double cy = (g.dim() == 2 && !cfg.disable_diffusion)
                          ? dt * params.D * params.D / (g.h(1) * g.h(1))
                          : 0.0;
    const bool semi = cfg.reaction_mode == ReactionMode::semi_implicit;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(map.unknowns * 5);
    auto add = [&](std::size_t row_full, int ii, int jj, double v) {
        const std::ptrdiff_t col = map.full_to_int[g.index(ii, jj)];
        if (col >= 0)
            trips.emplace_back(static_cast<int>(map.full_to_int[row_full]),
                               static_cast<int>(col), v);
    };
    for (int j = (g.dim() == 2 ? 1 : 0); j < (g.dim() == 2 ? ny - 1 : 1); ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const std::size_t c = g.index(i, j);
            double diag = 1.0 + 2.0 * cx + 2.0 * cy;
            if (semi) diag += dt * rho[c];
            add(c, i, j, diag);
            add(c, i + 1, j, -cx);
            add(c, i - 1, j, -cx);
            if (g.dim() == 2) {
                add(c, i, j + 1, -cy);
                add(c, i, j - 1, -cy);
            }
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<int>(map.unknowns),
                                  static_cast<int>(map.unknowns));
    A.setFromTriplets(trips.begin(), trips.end());

    const double e2 = params.E * params.E;
    VectorField out(g, 0.0);
    for (int d = 0; d < m.dim(); ++d) {
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(map.unknowns));
        for (std::size_t k = 0; k < map.unknowns; ++k) {
            const std::size_t i = map.int_to_full[k];
            double r = m.comp[d][i] + dt * e2 * mdg[i] * gp.comp[d][i];
            if (!semi) r -= dt * rho[i] * m.comp[d][i];
            if (cfg.forcing) r += dt * cfg.forcing->comp[d][i];
            rhs[static_cast<Eigen::Index>(k)] = r;
        }
        const Eigen::VectorXd x0 = map.restrict_interior(m.comp[d]);
        const Eigen::VectorXd x = pcg_solve(A, rhs, cfg.cg_tol, 20 * map.unknowns, &x0);
        out.comp[d] = map.extend_with_zero(g, x);
    }
    if (!all_finite(out)) throw BlowUp("advance: non-finite values in the update");
    return out;
}

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

double monotonicity_gap(std::span<const double> x, std::span<const double> y,
                        double gamma) {
    if (!(gamma > 0.5)) throw DomainError("monotonicity_gap: gamma must be > 0.5");
    if (x.size() != y.size())
        throw DomainError("monotonicity_gap: dimension mismatch");

    const double nx = norm(x);
    const double ny = norm(y);
    // phi(v) = |v|^(2 gamma - 2) v, continuously extended by phi(0) = 0
    const double fx = nx > 0.0 ? std::pow(nx, 2.0 * gamma - 2.0) : 0.0;
    const double fy = ny > 0.0 ? std::pow(ny, 2.0 * gamma - 2.0) : 0.0;

    double dot = 0.0, dsq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        dot += (fx * x[i] - fy * y[i]) * diff;
        dsq += diff * diff;
    }
    const double dn = std::sqrt(dsq);

    if (gamma >= 1.0)
        return dot - std::pow(2.0, 1.0 - 2.0 * gamma) * std::pow(dn, 2.0 * gamma);
    const double scale = nx + ny;
    const double lhs = scale > 0.0 ? std::pow(scale, 2.0 - 2.0 * gamma) * dot : 0.0;
    return lhs - (2.0 * gamma - 1.0) * dsq;
}

} // namespace netform
