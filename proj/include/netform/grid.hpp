// Uniform tensor grids, nodal fields, discrete differential operators and norms.
//
// Grids live on [0,Lx] (1D) or [0,Lx]x[0,Ly] (2D) with nodes that include the
// boundary. Fields are nodal values in row-major order (x fastest). Quadrature
// is the tensor trapezoid rule, so constants integrate to the domain measure
// exactly. Differentiation uses central differences at interior nodes and
// one-sided second-order stencils at the boundary; both are exact on affine
// fields, and the resulting gradient/divergence pair satisfies the discrete
// integration-by-parts identity exactly for field pairs vanishing on the
// boundary.
#pragma once

#include <array>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "netform/errors.hpp"

namespace netform {

class Grid {
public:
    Grid(int dim, std::array<int, 2> n, std::array<double, 2> extent);

    static Grid line(int n, double length = 1.0);
    static Grid rectangle(int nx, int ny, double lx = 1.0, double ly = 1.0);

    int dim() const { return dim_; }
    int n(int axis) const { return n_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    double h(int axis) const { return h_[axis]; }
    std::size_t node_count() const { return count_; }
    double measure() const;

    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * n_[0] + ix;
    }
    int ix(std::size_t idx) const { return static_cast<int>(idx % n_[0]); }
    int iy(std::size_t idx) const { return static_cast<int>(idx / n_[0]); }
    bool on_boundary(std::size_t idx) const;
    double coord(int axis, int i) const { return i * h_[axis]; }
    std::array<double, 2> position(std::size_t idx) const;

    // Tensor trapezoid weight of a node: h per axis, halved on the boundary.
    double quad_weight(std::size_t idx) const;

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int dim_;
    std::array<int, 2> n_;
    std::array<double, 2> extent_;
    std::array<double, 2> h_;
    std::size_t count_;
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(g.node_count(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

struct VectorField {
    Grid grid;
    std::vector<ScalarField> comp; // one ScalarField per space dimension

    explicit VectorField(const Grid& g, double fill = 0.0)
        : grid(g), comp(static_cast<std::size_t>(g.dim()), ScalarField(g, fill)) {}

    int dim() const { return grid.dim(); }
};

// Clamp band for level-set truncations.
struct TruncationBounds {
    double lo;
    double hi;
};

// Fill a field from a callable f(x) resp. f(x,y).
template <class F>
ScalarField sample(const Grid& g, F&& f) {
    ScalarField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto pos = g.position(i);
        if constexpr (std::is_invocable_v<F, double, double>)
            out[i] = f(pos[0], pos[1]);
        else
            out[i] = f(pos[0]);
    }
    return out;
}

template <class F>
VectorField sample_vector(const Grid& g, F&& f) {
    VectorField out(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        auto pos = g.position(i);
        auto v = (g.dim() == 1) ? f(pos[0], 0.0) : f(pos[0], pos[1]);
        for (int d = 0; d < g.dim(); ++d) out.comp[d][i] = v[d];
    }
    return out;
}

bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& v);

// Nodal derivative of f along `axis` (central interior, one-sided boundary).
ScalarField derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);

ScalarField truncate(const ScalarField& f, TruncationBounds b);

// Quadrature and norms. lq_norm requires q >= 1; quadrature_power_mean is the
// unchecked (sum w |f|^q)^(1/q) also used for the q < 1 quasinorms in sweeps.
double quadrature(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double quadrature_power_mean(const ScalarField& f, double q);
double lq_norm(const ScalarField& f, double q);
double sup_norm(const ScalarField& f);
double weak_lq_norm(const ScalarField& f, double q);

// |v|^2 pointwise; sup_norm of a vector field is the max Euclidean magnitude.
ScalarField magnitude_squared(const VectorField& v);
double sup_norm(const VectorField& v);

} // namespace netform
