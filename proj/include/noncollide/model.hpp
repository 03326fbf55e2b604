#pragma once

#include <string>
#include <vector>

#include "noncollide/matrix.hpp"

namespace noncollide {

// Drift families b^i. The system requires b^i(z) <= b^{i+1}(z) for every z;
// affine drifts can only satisfy that pointwise ordering with one shared
// slope and non-decreasing intercepts, so that is the whole family offered.
enum class DriftKind { Zero, AffineSharedSlope };

struct DriftSpec {
    DriftKind kind = DriftKind::Zero;
    double slope = 0.0;
    std::vector<double> intercepts;  // length d, non-decreasing (AffineSharedSlope)

    double lipschitz() const { return kind == DriftKind::Zero ? 0.0 : std::abs(slope); }
};

// Full description of one interacting-particle system:
//   dX^i = ( sum_{j != i} gamma_ij / (X^i - X^j) + b^i(X^i) ) dt + sum_j sigma_ij dW^j
// with strictly ordered initial positions.
struct SystemSpec {
    int d = 0;
    Matrix gamma;             // d x d symmetric, entries >= 0, diagonal unused
    Matrix sigma;             // d x d constant diffusion coefficients
    DriftSpec drift;
    std::vector<double> x0;   // strictly increasing
    double horizon = 0.0;     // T
};

struct Violation {
    std::string rule;
    std::string message;
};

struct ValidationReport {
    bool ok = false;
    std::vector<Violation> violations;
    std::vector<Violation> warnings;
    double sigma_sq = 0.0;     // sup_i sum_k sigma_ik^2
    std::vector<double> c;     // noise scale per gap index
    double gamma_sup = 0.0;    // sup_{i != j} gamma_ij
};

// Checks well-posedness of the spec. With strict=true the two convergence-
// theorem hypotheses (sigma^2 <= 2 min_i gamma_{i,i+1}, read over the
// super-diagonal, and (c^i)^2 >= (d-1) sup gamma) become hard violations;
// otherwise they are reported as warnings. Never throws: all findings are
// in the report.
ValidationReport validate(const SystemSpec& spec, bool strict);

// b^i evaluated at z; i is a 0-based particle index. Throws std::out_of_range.
double drift_eval(const SystemSpec& spec, int i, double z);

}  // namespace noncollide
