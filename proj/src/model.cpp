#include "noncollide/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "noncollide/coeffs.hpp"

namespace noncollide {

namespace {

std::string fmt_idx(int i) { return std::to_string(i + 1); }  // report in 1-based notation

}  // namespace

ValidationReport validate(const SystemSpec& spec, bool strict) {
    ValidationReport rep;
    auto flag = [&rep](const char* rule, std::string msg) {
        rep.violations.push_back({rule, std::move(msg)});
    };

    const int d = spec.d;
    if (d < 2) flag("d-min", "d must be at least 2, got " + std::to_string(d));
    if (spec.gamma.rows() != d || spec.gamma.cols() != d)
        flag("gamma-shape", "gamma must be d x d");
    if (spec.sigma.rows() != d || spec.sigma.cols() != d)
        flag("sigma-shape", "sigma must be d x d");
    if (static_cast<int>(spec.x0.size()) != d)
        flag("x0-shape", "x0 must have length d");
    if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon))
        flag("horizon-positive", "horizon must be a positive real");
    if (!rep.violations.empty()) {
        rep.ok = false;
        return rep;  // shapes are broken, derived quantities are meaningless
    }

    for (int i = 0; i + 1 < d; ++i) {
        if (!(spec.x0[i] < spec.x0[i + 1])) {
            flag("x0-ordered", "x0 not strictly increasing at positions " + fmt_idx(i) +
                                   "," + fmt_idx(i + 1));
        }
    }

    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;  // diagonal never enters the dynamics
            if (spec.gamma(i, j) != spec.gamma(j, i))
                flag("gamma-symmetric", "gamma[" + fmt_idx(i) + "][" + fmt_idx(j) +
                                            "] != gamma[" + fmt_idx(j) + "][" + fmt_idx(i) + "]");
            if (!(spec.gamma(i, j) >= 0.0))
                flag("gamma-nonnegative",
                     "gamma[" + fmt_idx(i) + "][" + fmt_idx(j) + "] is negative");
        }
    }
    for (int i = 0; i + 1 < d; ++i) {
        if (!(spec.gamma(i, i + 1) > 0.0))
            flag("gamma-superdiag-positive",
                 "gamma[" + fmt_idx(i) + "][" + fmt_idx(i + 1) + "] must be > 0");
    }

    if (spec.drift.kind == DriftKind::AffineSharedSlope) {
        if (static_cast<int>(spec.drift.intercepts.size()) != d) {
            flag("drift-shape", "affine drift needs d intercepts");
        } else {
            for (int i = 0; i + 1 < d; ++i) {
                if (!(spec.drift.intercepts[i] <= spec.drift.intercepts[i + 1]))
                    flag("drift-ordered", "drift intercepts must be non-decreasing; a_" +
                                              fmt_idx(i) + " > a_" + fmt_idx(i + 1));
            }
        }
        if (!std::isfinite(spec.drift.slope))
            flag("drift-slope-finite", "drift slope must be finite");
    }

    rep.sigma_sq = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int k = 0; k < d; ++k) row += spec.sigma(i, k) * spec.sigma(i, k);
        rep.sigma_sq = std::max(rep.sigma_sq, row);
    }
    rep.c = compute_c(spec);
    rep.gamma_sup = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) rep.gamma_sup = std::max(rep.gamma_sup, spec.gamma(i, j));

    // The well-posedness bound sigma^2 <= 2 gamma_ij does not pin down
    // (i,j); off-tridiagonal entries may legitimately be 0, so the check
    // reads it over the super-diagonal.
    double min_super = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < d; ++i) min_super = std::min(min_super, spec.gamma(i, i + 1));
    auto soft = [&](const char* rule, std::string msg) {
        if (strict)
            rep.violations.push_back({rule, std::move(msg)});
        else
            rep.warnings.push_back({rule, std::move(msg)});
    };
    if (!(rep.sigma_sq <= 2.0 * min_super)) {
        soft("sigma-bound", "sigma^2 = " + std::to_string(rep.sigma_sq) +
                                " exceeds 2*min_i gamma[i][i+1] = " +
                                std::to_string(2.0 * min_super) +
                                " (bound read over the super-diagonal)");
    }
    for (int i = 0; i < d; ++i) {
        const double lhs = rep.c[i] * rep.c[i];
        const double rhs = (d - 1) * rep.gamma_sup;
        if (!(lhs >= rhs)) {
            soft("c-theorem-bound", "(c^" + std::to_string(i) + ")^2 = " + std::to_string(lhs) +
                                        " < (d-1)*sup gamma = " + std::to_string(rhs) +
                                        " (convergence-theorem hypothesis, not well-posedness)");
        }
    }

    rep.ok = rep.violations.empty();
    return rep;
}

double drift_eval(const SystemSpec& spec, int i, double z) {
    if (i < 0 || i >= spec.d) throw std::out_of_range("drift_eval: particle index out of range");
    switch (spec.drift.kind) {
        case DriftKind::Zero:
            return 0.0;
        case DriftKind::AffineSharedSlope:
            return spec.drift.intercepts[i] + spec.drift.slope * z;
    }
    return 0.0;
}

}  // namespace noncollide
