#include "netform/elliptic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace netform {

namespace {

// Nodal coefficient tensor A = I + m (x) m.
struct CoefficientTensor {
    std::vector<double> a11, a22, a12;

    explicit CoefficientTensor(const VectorField& m) {
        const std::size_t n = m.grid.node_count();
        a11.resize(n);
        if (m.dim() == 2) {
            a22.resize(n);
            a12.resize(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double m1 = m.comp[0][i];
            a11[i] = 1.0 + m1 * m1;
            if (m.dim() == 2) {
                const double m2 = m.comp[1][i];
                a22[i] = 1.0 + m2 * m2;
                a12[i] = m1 * m2;
            }
        }
    }
};

} // namespace

EllipticOperator assemble(const VectorField& m) {
    if (!all_finite(m)) throw NonFiniteField("assemble: m has non-finite entries");
    const Grid& g = m.grid;
    InteriorMap map(g);
    const CoefficientTensor A(m);

    const int nx = g.n(0);
    const int ny = g.dim() == 2 ? g.n(1) : 1;
    const double ihx2 = 1.0 / (g.h(0) * g.h(0));
    const double ihy2 = g.dim() == 2 ? 1.0 / (g.h(1) * g.h(1)) : 0.0;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(map.unknowns * (g.dim() == 2 ? 9 : 3));
    auto add = [&](std::size_t row_full, int ii, int jj, double v) {
        const std::ptrdiff_t col = map.full_to_int[g.index(ii, jj)];
        if (col >= 0)
            trips.emplace_back(static_cast<int>(map.full_to_int[row_full]),
                               static_cast<int>(col), v);
    };

    for (int j = (g.dim() == 2 ? 1 : 0); j < (g.dim() == 2 ? ny - 1 : 1); ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const std::size_t c = g.index(i, j);
            // fluxes through the four (two in 1D) faces, arithmetic averages
            const double axp = 0.5 * (A.a11[c] + A.a11[g.index(i + 1, j)]);
            const double axm = 0.5 * (A.a11[c] + A.a11[g.index(i - 1, j)]);
            double diag = (axp + axm) * ihx2;
            add(c, i + 1, j, -axp * ihx2);
            add(c, i - 1, j, -axm * ihx2);
            if (g.dim() == 2) {
                const double ayp = 0.5 * (A.a22[c] + A.a22[g.index(i, j + 1)]);
                const double aym = 0.5 * (A.a22[c] + A.a22[g.index(i, j - 1)]);
                diag += (ayp + aym) * ihy2;
                add(c, i, j + 1, -ayp * ihy2);
                add(c, i, j - 1, -aym * ihy2);

                // cross terms -dx(a12 dy p) - dy(a12 dx p), averaged central
                // differences; they couple only the diagonal neighbors
                const double s = 1.0 / (4.0 * g.h(0) * g.h(1));
                const double ce = A.a12[g.index(i + 1, j)];
                const double cw = A.a12[g.index(i - 1, j)];
                const double cn = A.a12[g.index(i, j + 1)];
                const double cs = A.a12[g.index(i, j - 1)];
                add(c, i + 1, j + 1, -(ce + cn) * s);
                add(c, i - 1, j - 1, -(cw + cs) * s);
                add(c, i + 1, j - 1, (ce + cs) * s);
                add(c, i - 1, j + 1, (cw + cn) * s);
            }
            add(c, i, j, diag);
        }
    }

    Eigen::SparseMatrix<double> M(static_cast<int>(map.unknowns),
                                  static_cast<int>(map.unknowns));
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseMatrix<double> Mt = M.transpose();
    Eigen::SparseMatrix<double> D = M - Mt;
    double defect = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
            defect = std::max(defect, std::abs(it.value()));
    M = 0.5 * (M + Mt);
    return EllipticOperator(g, std::move(map), std::move(M), defect);
}

ScalarField solve_pressure(const VectorField& m, const ScalarField& S, double tol,
                           const ScalarField* guess) {
    if (!(tol > 0.0)) throw DomainError("solve_pressure: tol must be positive");
    if (m.grid != S.grid) throw DomainError("solve_pressure: grid mismatch");
    EllipticOperator op = assemble(m);
    const Eigen::VectorXd b = op.interior().restrict_interior(S);
    Eigen::VectorXd x0;
    if (guess && guess->grid == m.grid)
        x0 = op.interior().restrict_interior(*guess);
    const Eigen::VectorXd x = pcg_solve(op.matrix(), b, tol, 20 * op.unknowns(),
                                        x0.size() ? &x0 : nullptr);
    return op.interior().extend_with_zero(op.grid(), x);
}

std::pair<double, double> rayleigh_bounds(const EllipticOperator& op,
                                          const VectorField& m, int trials,
                                          std::uint64_t seed) {
    if (trials < 1) throw DomainError("rayleigh_bounds: trials must be >= 1");
    EllipticOperator lap = assemble(VectorField(m.grid, 0.0));
    std::mt19937_64 rng(seed);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    Eigen::VectorXd xi(static_cast<Eigen::Index>(op.unknowns()));
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = uniform(rng, -1.0, 1.0);
        const double num = xi.dot(op.matrix() * xi);
        const double den = xi.dot(lap.matrix() * xi);
        const double q = num / den;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

} // namespace netform
