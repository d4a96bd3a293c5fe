// Closed-form thresholds and equality dynamics of the recursive-inequality
// lemmas, plus the interpreter for Picard traces.
#pragma once

#include <vector>

#include "netform/coupling.hpp"

namespace netform {

// Data of the superlinear recursion y_{n+1} <= c b^n y_n^(1+alpha), b > 1.
struct GeometricRecursion {
    double c;
    double b;
    double alpha;
};

// Data of the perturbed recursion b_k <= b_0 + lambda b_{k-1}^(1+alpha).
struct PerturbedRecursion {
    double b0;
    double lambda;
    double alpha;
};

// Threshold c^(-1/alpha) b^(-1/alpha^2): below it the recursion decays to 0.
double ynb_threshold(const GeometricRecursion& r);

struct YnbSequence {
    std::vector<double> y;
    bool overflow = false; // some y_n exceeded 1e300
};

// Iterates the equality dynamics y_{n+1} = c b^n y_n^(1+alpha), which dominate
// every admissible sequence. At the threshold the closed form gives exactly
// y_n = y_0 b^(-n/alpha).
YnbSequence ynb_iterate(const GeometricRecursion& r, double y0, int n_max);

struct SmallCheck {
    bool applies;  // 2 lambda (2 b0)^alpha < 1
    double bound;  // b0 / (1 - lambda (2 b0)^alpha) <= 2 b0 when it applies
};

SmallCheck small_check(const PerturbedRecursion& r);

// Equality dynamics b_k = b_0 + lambda b_{k-1}^(1+alpha), b_0 at k = 0.
std::vector<double> perturbed_iterate(const PerturbedRecursion& r, int k_max);

struct PicardInterpretation {
    bool plateau_ok;          // max_k d_k <= 2 (d_0 + d_1)
    double contraction_ratio; // geometric mean of eta_{k+1}/eta_k over the tail
};

// Throws TooShortTrace for traces with fewer than 3 iterates.
PicardInterpretation interpret_picard(const PicardTrace& trace);

} // namespace netform
