#include "noncollide/coeffs.hpp"

#include <cmath>

namespace noncollide {

std::vector<double> positions_from_gaps(const GapVector& gaps) {
    std::vector<double> pos(gaps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        acc += gaps[i];
        pos[i] = acc;
    }
    return pos;
}

std::vector<double> compute_c(const SystemSpec& spec) {
    const int d = spec.d;
    std::vector<double> c(d);
    for (int i = 0; i < d; ++i) {
        // gap i sits between particles i and i+1 (1-based), and the
        // virtual sigma row 0 is identically zero
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            const double hi = spec.sigma(i, k);
            const double lo = (i >= 1) ? spec.sigma(i - 1, k) : 0.0;
            s += (hi - lo) * (hi - lo);
        }
        c[i] = std::sqrt(s);
    }
    return c;
}

FrozenCoeffs freeze(const SystemSpec& spec, const GapVector& g, double eps_den) {
    const std::vector<double> c = compute_c(spec);
    return freeze(spec, g, eps_den, c);
}

FrozenCoeffs freeze(const SystemSpec& spec, const GapVector& g, double eps_den,
                    std::span<const double> c) {
    const int d = spec.d;
    FrozenCoeffs out;
    out.alpha.assign(d, 0.0);
    out.beta.assign(d, 0.0);
    out.c.assign(c.begin(), c.end());

    const std::vector<double> pos = positions_from_gaps(g);
    // 1-based particle index j = 0..d, with the phantom particle 0 at the origin
    auto P = [&pos](int j) { return j == 0 ? 0.0 : pos[j - 1]; };
    // interaction strength between 1-based particles a and b
    auto gam = [&spec](int a, int b) {
        return (a == 0 || b == 0) ? 0.0 : spec.gamma(a - 1, b - 1);
    };
    // b^j at the 1-based particle index, b^0 == 0
    auto bfun = [&spec](int j, double z) { return j == 0 ? 0.0 : drift_eval(spec, j - 1, z); };

    for (int i = 0; i < d; ++i) {
        double alpha = 0.0;
        const double bnum = bfun(i + 1, P(i + 1)) - bfun(i, P(i));
        if (bnum != 0.0) alpha += bnum / guard_denominator(g[i], eps_den, out.guard_hits);

        double beta = 0.0;
        for (int k = 1; k <= d; ++k) {
            if (k == i || k == i + 1) continue;
            const double g_ik = gam(i, k);
            const double g_i1k = gam(i + 1, k);
            if (g_ik != 0.0) {
                const double y_ik = P(i) - P(k);
                const double y_i1k = P(i + 1) - P(k);
                alpha -= g_ik / (guard_denominator(y_i1k, eps_den, out.guard_hits) *
                                 guard_denominator(y_ik, eps_den, out.guard_hits));
            }
            if (g_ik != g_i1k) {
                const double y_i1k = P(i + 1) - P(k);
                beta += (g_ik - g_i1k) / guard_denominator(y_i1k, eps_den, out.guard_hits);
            }
        }
        out.alpha[i] = alpha;
        out.beta[i] = beta;
    }
    return out;
}

std::vector<double> project_noise(const SystemSpec& spec, std::span<const double> c,
                                  std::span<const double> dW) {
    const int d = spec.d;
    std::vector<double> out(d, 0.0);
    for (int i = 0; i < d; ++i) {
        if (!(c[i] > 0.0)) continue;  // noiseless gap
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double hi = spec.sigma(i, j);
            const double lo = (i >= 1) ? spec.sigma(i - 1, j) : 0.0;
            s += (hi - lo) * dW[j];
        }
        out[i] = s / c[i];
    }
    return out;
}

}  // namespace noncollide
