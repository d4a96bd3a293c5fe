#include "netform/linalg.hpp"

#include <cmath>

namespace netform {

InteriorMap::InteriorMap(const Grid& g)
    : unknowns(0), full_to_int(g.node_count(), -1) {
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!g.on_boundary(i)) {
            full_to_int[i] = static_cast<std::ptrdiff_t>(unknowns++);
            int_to_full.push_back(i);
        }
    }
}

Eigen::VectorXd InteriorMap::restrict_interior(const ScalarField& f) const {
    Eigen::VectorXd x(unknowns);
    for (std::size_t k = 0; k < unknowns; ++k) x[k] = f[int_to_full[k]];
    return x;
}

ScalarField InteriorMap::extend_with_zero(const Grid& g, const Eigen::VectorXd& x) const {
    ScalarField f(g, 0.0);
    for (std::size_t k = 0; k < unknowns; ++k) f[int_to_full[k]] = x[k];
    return f;
}

Eigen::VectorXd pcg_solve(const Eigen::SparseMatrix<double>& A,
                          const Eigen::VectorXd& b, double rel_tol,
                          std::size_t max_iter, const Eigen::VectorXd* x0) {
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    if (bnorm == 0.0) return x;
    if (x0 && x0->size() == b.size()) x = *x0;

    Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
    Eigen::VectorXd r = b - A * x;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double target = rel_tol * bnorm;

    for (std::size_t it = 0; it < max_iter; ++it) {
        if (r.norm() <= target) {
            // recurrence residual can drift; accept only on the true residual
            r = b - A * x;
            if (r.norm() <= target) return x;
            z = inv_diag.cwiseProduct(r);
            p = z;
            rz = r.dot(z);
        }
        Eigen::VectorXd Ap = A * p;
        const double alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    if ((b - A * x).norm() <= target) return x;
    throw SolverDiverged("pcg: iteration cap reached before tolerance");
}

} // namespace netform
