// One IMEX step of the conductance equation
//   dt m - D^2 Lap m - E^2 (m . grad p) grad p + |m|^(2(gamma-1)) m = 0
// with homogeneous Dirichlet data, plus the vector monotonicity gap that
// underpins uniqueness of the reaction term.
#pragma once

#include <span>

#include "netform/grid.hpp"

namespace netform {

// Physical data of the coupled system. gamma = 1 models leaf venation.
struct PhysParams {
    double D = 1.0;     // diffusion
    double E = 1.0;     // activation
    double gamma = 1.0; // metabolic exponent, > 1/2
    ScalarField S;      // source
    VectorField m0;     // initial conductance, zero on the boundary

    PhysParams(ScalarField source, VectorField initial)
        : S(std::move(source)), m0(std::move(initial)) {}

    // throws DomainError on violated bounds or m0 nonzero on the boundary
    void validate() const;
};

enum class ReactionMode { semi_implicit, explicit_ };

struct StepConfig {
    double dt = 1e-3;
    double eps_reg = 1e-12; // reaction regularization, used only for gamma < 1
    ReactionMode reaction_mode = ReactionMode::semi_implicit;
    double cg_tol = 1e-10;

    // test hooks
    bool disable_diffusion = false;
    const VectorField* forcing = nullptr; // extra RHS, evaluated at the new time
};

// Backward-Euler diffusion (one SPD solve per component sharing the matrix and
// preconditioner), explicit activation at the old state, semi-implicit
// reaction m_new (|m_old|^2 + eps)^(gamma-1). Result is zero on the boundary.
// Throws SolverDiverged from the inner solves and BlowUp on non-finite output.
VectorField advance(const VectorField& m, const ScalarField& p,
                    const PhysParams& params, const StepConfig& cfg);

// Monotonicity gap of the reaction nonlinearity phi(v) = |v|^(2(gamma-1)) v,
// the quantity behind uniqueness of the reaction term. For gamma >= 1 returns
//   (phi(x) - phi(y)) . (x - y) - 2^(1-2 gamma) |x-y|^(2 gamma),
// for 1/2 < gamma <= 1
//   (|x|+|y|)^(2-2 gamma) (phi(x) - phi(y)) . (x - y) - (2 gamma - 1)|x-y|^2.
// Both are nonnegative up to roundoff. Throws DomainError for gamma <= 1/2.
double monotonicity_gap(std::span<const double> x, std::span<const double> y,
                        double gamma);

} // namespace netform
