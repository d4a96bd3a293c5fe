#include "netform/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netform {

namespace {

void check(const GeometricRecursion& r) {
    if (!(r.c > 0.0) || !(r.b > 1.0) || !(r.alpha > 0.0))
        throw DomainError("geometric recursion needs c > 0, b > 1, alpha > 0");
}

void check(const PerturbedRecursion& r) {
    if (!(r.b0 >= 0.0) || !(r.lambda > 0.0) || !(r.alpha > 0.0))
        throw DomainError("perturbed recursion needs b0 >= 0, lambda > 0, alpha > 0");
}

} // namespace

double ynb_threshold(const GeometricRecursion& r) {
    check(r);
    return std::pow(r.c, -1.0 / r.alpha) *
           std::pow(r.b, -1.0 / (r.alpha * r.alpha));
}

YnbSequence ynb_iterate(const GeometricRecursion& r, double y0, int n_max) {
    check(r);
    if (!(y0 >= 0.0)) throw DomainError("ynb_iterate: y0 must be nonnegative");
    YnbSequence seq;
    seq.y.push_back(y0);
    double y = y0;
    double bn = 1.0;
    for (int n = 0; n < n_max; ++n) {
        y = r.c * bn * std::pow(y, 1.0 + r.alpha);
        bn *= r.b;
        if (!(y <= 1e300)) {
            seq.overflow = true;
            seq.y.push_back(std::min(y, std::numeric_limits<double>::infinity()));
            break;
        }
        seq.y.push_back(y);
    }
    return seq;
}

SmallCheck small_check(const PerturbedRecursion& r) {
    check(r);
    SmallCheck out;
    const double gate = 2.0 * r.lambda * std::pow(2.0 * r.b0, r.alpha);
    out.applies = gate < 1.0;
    out.bound = out.applies
                    ? r.b0 / (1.0 - r.lambda * std::pow(2.0 * r.b0, r.alpha))
                    : std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::vector<double> perturbed_iterate(const PerturbedRecursion& r, int k_max) {
    check(r);
    std::vector<double> b{r.b0};
    for (int k = 1; k <= k_max; ++k)
        b.push_back(r.b0 + r.lambda * std::pow(b.back(), 1.0 + r.alpha));
    return b;
}

PicardInterpretation interpret_picard(const PicardTrace& trace) {
    if (trace.iterates() < 3)
        throw TooShortTrace("interpret_picard needs at least 3 iterates");
    PicardInterpretation out;
    const double d_max = *std::max_element(trace.d.begin(), trace.d.end());
    out.plateau_ok = d_max <= 2.0 * (trace.d[0] + trace.d[1]);

    // geometric mean of successive eta ratios over the tail half
    const std::size_t n_ratios = trace.eta.size() >= 2 ? trace.eta.size() - 1 : 0;
    double log_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = n_ratios / 2; k < n_ratios; ++k) {
        if (trace.eta[k] > 0.0 && trace.eta[k + 1] > 0.0) {
            log_sum += std::log(trace.eta[k + 1] / trace.eta[k]);
            ++count;
        }
    }
    out.contraction_ratio = count > 0 ? std::exp(log_sum / count) : 0.0;
    return out;
}

} // namespace netform
