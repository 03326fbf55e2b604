#pragma once

#include <random>
#include <vector>

#include "noncollide/coeffs.hpp"
#include "noncollide/model.hpp"

namespace nctest {

// Dyson-type system: constant off-diagonal gamma, diagonal sigma.
inline noncollide::SystemSpec dyson(int d, double gamma, std::vector<double> x0,
                                    double sigma = 1.0, double horizon = 1.0) {
    noncollide::SystemSpec spec;
    spec.d = d;
    spec.gamma = noncollide::Matrix(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) spec.gamma(i, j) = gamma;
    spec.sigma = noncollide::Matrix(d, d);
    for (int i = 0; i < d; ++i) spec.sigma(i, i) = sigma;
    spec.x0 = std::move(x0);
    spec.horizon = horizon;
    return spec;
}

inline std::vector<double> equally_spaced(int d, double spacing = 1.0) {
    std::vector<double> x0(d);
    const double mid = 0.5 * (d - 1);
    for (int i = 0; i < d; ++i) x0[i] = (i - mid) * spacing;
    return x0;
}

// Independent route for the frozen-drift identity: the gap drift of the
// split system evaluated directly at the same positions,
//   -sum_{k != i,i+1} (g_ik Y^{i+1,k} - g_{i+1,k} Y^{i,k}) / (Y^{i+1,k} Y^{i,k})
//   + b^{i+1} - b^i,
// which equals the full difference-process drift minus the
// 2 gamma / Y^{i+1,i} repulsion term.
inline std::vector<double> split_drift_direct(const noncollide::SystemSpec& spec,
                                              const noncollide::GapVector& g) {
    using noncollide::positions_from_gaps;
    const int d = spec.d;
    const std::vector<double> pos = positions_from_gaps(g);
    auto P = [&pos](int j) { return j == 0 ? 0.0 : pos[j - 1]; };
    auto gam = [&spec](int a, int b) {
        return (a == 0 || b == 0) ? 0.0 : spec.gamma(a - 1, b - 1);
    };
    auto bfun = [&spec](int j, double z) {
        return j == 0 ? 0.0 : noncollide::drift_eval(spec, j - 1, z);
    };
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) {
        double s = bfun(i + 1, P(i + 1)) - bfun(i, P(i));
        for (int k = 1; k <= d; ++k) {
            if (k == i || k == i + 1) continue;
            const double y_i1k = P(i + 1) - P(k);
            const double y_ik = P(i) - P(k);
            s -= (gam(i, k) * y_i1k - gam(i + 1, k) * y_ik) / (y_i1k * y_ik);
        }
        out[i] = s;
    }
    return out;
}

}  // namespace nctest
