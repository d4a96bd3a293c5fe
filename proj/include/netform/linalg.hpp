// Interior-node indexing and the Jacobi-preconditioned CG solve shared by the
// elliptic and parabolic modules.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>

#include "netform/grid.hpp"

namespace netform {

// Maps between full nodal indexing and the interior unknowns of a grid.
struct InteriorMap {
    explicit InteriorMap(const Grid& g);

    std::size_t unknowns;
    std::vector<std::ptrdiff_t> full_to_int; // -1 on boundary nodes
    std::vector<std::size_t> int_to_full;

    Eigen::VectorXd restrict_interior(const ScalarField& f) const;
    ScalarField extend_with_zero(const Grid& g, const Eigen::VectorXd& x) const;
};

// Solves A x = b for SPD A. Stops when ||b - A x||_2 <= rel_tol * ||b||_2,
// throws SolverDiverged at max_iter. b = 0 returns x = 0 exactly. An optional
// initial guess warm-starts the iteration (time steppers pass the previous
// solution); the residual contract is unchanged.
Eigen::VectorXd pcg_solve(const Eigen::SparseMatrix<double>& A,
                          const Eigen::VectorXd& b, double rel_tol,
                          std::size_t max_iter,
                          const Eigen::VectorXd* x0 = nullptr);

// Portable uniform doubles from raw 64-bit outputs (keeps runs reproducible
// across standard library implementations).
inline double uniform01(std::uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

template <class Rng>
double uniform(Rng& rng, double a, double b) {
    return a + (b - a) * uniform01(rng());
}

} // namespace netform
