// Anisotropic pressure equation -div[(I + m (x) m) grad p] = S with p = 0 on
// the boundary: conservative assembly, PCG solve, and ellipticity checks.
#pragma once

#include <cstdint>
#include <utility>

#include "netform/grid.hpp"
#include "netform/linalg.hpp"

namespace netform {

// Sparse SPD operator over the interior nodes. Diagonal entries of the
// coefficient tensor A = I + m (x) m are discretized in conservative flux form
// with arithmetic face averages; the off-diagonal (cross) entries use averaged
// central differences and the matrix is symmetrized explicitly afterwards.
class EllipticOperator {
public:
    EllipticOperator(Grid grid, InteriorMap interior,
                     Eigen::SparseMatrix<double> matrix, double symmetry_defect)
        : grid_(std::move(grid)), interior_(std::move(interior)),
          matrix_(std::move(matrix)), symmetry_defect_(symmetry_defect) {}

    const Grid& grid() const { return grid_; }
    const InteriorMap& interior() const { return interior_; }
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    std::size_t unknowns() const { return interior_.unknowns; }

    // max |M - M^T| entry observed before the explicit symmetrization
    double symmetry_defect() const { return symmetry_defect_; }

private:
    Grid grid_;
    InteriorMap interior_;
    Eigen::SparseMatrix<double> matrix_;
    double symmetry_defect_;
};

// Throws NonFiniteField if m has non-finite entries.
EllipticOperator assemble(const VectorField& m);

// Solves the assembled system to ||op p - S_int||_2 <= tol ||S_int||_2 with a
// diagonally preconditioned CG capped at 20 * unknowns iterations; the result
// is zero on boundary nodes. Throws SolverDiverged at the cap. `guess`
// warm-starts the iteration (drivers pass the previous time level's p).
ScalarField solve_pressure(const VectorField& m, const ScalarField& S,
                           double tol = 1e-10,
                           const ScalarField* guess = nullptr);

// Min/max Rayleigh quotient (op xi . xi)/(Lap xi . xi) over `trials` random
// interior vectors; the sandwich [1, 1 + max|m|^2] holds up to roundoff.
std::pair<double, double> rayleigh_bounds(const EllipticOperator& op,
                                          const VectorField& m, int trials,
                                          std::uint64_t seed = 20240901u);

} // namespace netform
