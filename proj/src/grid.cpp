#include "netform/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netform {

Grid::Grid(int dim, std::array<int, 2> n, std::array<double, 2> extent)
    : dim_(dim), n_(n), extent_(extent) {
    if (dim != 1 && dim != 2) throw DomainError("grid dim must be 1 or 2");
    if (dim == 1) {
        n_[1] = 1;
        extent_[1] = 0.0;
    }
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] < 3) throw DomainError("grid needs at least 3 nodes per axis");
        if (!(extent_[a] > 0.0)) throw DomainError("grid extent must be positive");
        h_[a] = extent_[a] / (n_[a] - 1);
    }
    if (dim_ == 1) h_[1] = 0.0;
    count_ = static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
}

Grid Grid::line(int n, double length) { return Grid(1, {n, 1}, {length, 0.0}); }

Grid Grid::rectangle(int nx, int ny, double lx, double ly) {
    return Grid(2, {nx, ny}, {lx, ly});
}

double Grid::measure() const {
    double m = extent_[0];
    if (dim_ == 2) m *= extent_[1];
    return m;
}

bool Grid::on_boundary(std::size_t idx) const {
    const int i = ix(idx);
    if (i == 0 || i == n_[0] - 1) return true;
    if (dim_ == 2) {
        const int j = iy(idx);
        if (j == 0 || j == n_[1] - 1) return true;
    }
    return false;
}

std::array<double, 2> Grid::position(std::size_t idx) const {
    return {coord(0, ix(idx)), dim_ == 2 ? coord(1, iy(idx)) : 0.0};
}

double Grid::quad_weight(std::size_t idx) const {
    const int i = ix(idx);
    double w = h_[0] * ((i == 0 || i == n_[0] - 1) ? 0.5 : 1.0);
    if (dim_ == 2) {
        const int j = iy(idx);
        w *= h_[1] * ((j == 0 || j == n_[1] - 1) ? 0.5 : 1.0);
    }
    return w;
}

bool Grid::operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && extent_ == o.extent_;
}

bool all_finite(const ScalarField& f) {
    return std::all_of(f.values.begin(), f.values.end(),
                       [](double v) { return std::isfinite(v); });
}

bool all_finite(const VectorField& v) {
    return std::all_of(v.comp.begin(), v.comp.end(),
                       [](const ScalarField& c) { return all_finite(c); });
}

namespace {

// 1D stencil along a line of `n` values with stride `stride`.
void differentiate_line(const std::vector<double>& f, std::vector<double>& out,
                        std::size_t base, std::size_t stride, int n, double h) {
    const double inv2h = 1.0 / (2.0 * h);
    out[base] = (-3.0 * f[base] + 4.0 * f[base + stride] - f[base + 2 * stride]) * inv2h;
    for (int i = 1; i < n - 1; ++i) {
        const std::size_t k = base + i * stride;
        out[k] = (f[k + stride] - f[k - stride]) * inv2h;
    }
    const std::size_t e = base + static_cast<std::size_t>(n - 1) * stride;
    out[e] = (3.0 * f[e] - 4.0 * f[e - stride] + f[e - 2 * stride]) * inv2h;
}

} // namespace

ScalarField derivative(const ScalarField& f, int axis) {
    const Grid& g = f.grid;
    if (axis < 0 || axis >= g.dim()) throw DomainError("derivative axis out of range");
    ScalarField out(g);
    const int nx = g.n(0);
    const int ny = g.dim() == 2 ? g.n(1) : 1;
    if (axis == 0) {
        for (int j = 0; j < ny; ++j)
            differentiate_line(f.values, out.values, g.index(0, j), 1, nx, g.h(0));
    } else {
        for (int i = 0; i < nx; ++i)
            differentiate_line(f.values, out.values, g.index(i, 0), nx, ny, g.h(1));
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid);
    for (int d = 0; d < f.grid.dim(); ++d) out.comp[d] = derivative(f, d);
    return out;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.grid);
    for (int d = 0; d < v.dim(); ++d) {
        ScalarField dd = derivative(v.comp[d], d);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += dd[i];
    }
    return out;
}

ScalarField truncate(const ScalarField& f, TruncationBounds b) {
    if (!(b.lo < b.hi)) throw DomainError("truncation bounds need lo < hi");
    ScalarField out = f;
    for (double& v : out.values) v = std::clamp(v, b.lo, b.hi);
    return out;
}

double quadrature(const ScalarField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.grid.quad_weight(i) * f[i];
    return s;
}

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a.grid.quad_weight(i) * a[i] * b[i];
    return s;
}

double inner(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int d = 0; d < a.dim(); ++d) s += inner(a.comp[d], b.comp[d]);
    return s;
}

double quadrature_power_mean(const ScalarField& f, double q) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f.grid.quad_weight(i) * std::pow(std::abs(f[i]), q);
    return std::pow(s, 1.0 / q);
}

double lq_norm(const ScalarField& f, double q) {
    if (q < 1.0) throw DomainError("lq_norm requires q >= 1");
    return quadrature_power_mean(f, q);
}

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double weak_lq_norm(const ScalarField& f, double q) {
    if (q < 1.0) throw DomainError("weak_lq_norm requires q >= 1");
    std::vector<std::pair<double, double>> av(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        av[i] = {std::abs(f[i]), f.grid.quad_weight(i)};
    std::sort(av.begin(), av.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = 0.0, cumw = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        cumw += av[i].second;
        const bool last_of_level = (i + 1 == av.size()) || (av[i + 1].first < av[i].first);
        if (last_of_level && av[i].first > 0.0)
            best = std::max(best, av[i].first * std::pow(cumw, 1.0 / q));
    }
    return best;
}

ScalarField magnitude_squared(const VectorField& v) {
    ScalarField out(v.grid);
    for (int d = 0; d < v.dim(); ++d)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += v.comp[d][i] * v.comp[d][i];
    return out;
}

double sup_norm(const VectorField& v) {
    ScalarField m2 = magnitude_squared(v);
    double m = 0.0;
    for (double s : m2.values) m = std::max(m, s);
    return std::sqrt(m);
}

} // namespace netform
