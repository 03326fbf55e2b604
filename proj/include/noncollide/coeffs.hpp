#pragma once

#include <span>
#include <vector>

#include "noncollide/model.hpp"

namespace noncollide {

// Vector of adjacent differences of the auxiliary process, gap index
// i = 0..d-1. Index 0 is the first particle itself (the "gap" against the
// phantom particle fixed at the origin); entries carry no sign constraint.
using GapVector = std::vector<double>;

// Per-step frozen coefficients of the linearized gap SDE
//   dY^i = (alpha_i Y^i - beta_i) dt + c_i dB^i.
struct FrozenCoeffs {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> c;
    long guard_hits = 0;  // denominator-guard activations while freezing
};

// Positions as inclusive prefix sums of the gaps, ascending order.
std::vector<double> positions_from_gaps(const GapVector& gaps);

// Noise scale per gap: Euclidean distance between consecutive sigma rows,
// with the virtual row 0 identically zero (c[0] = |sigma row 1|).
std::vector<double> compute_c(const SystemSpec& spec);

// sign-preserving denominator guard; sign(0) counts as +1
inline double guard_denominator(double x, double eps, long& hits) {
    if (x >= eps || x <= -eps) return x;
    ++hits;
    return x >= 0.0 ? eps : -eps;
}

// Freeze the drift coefficients at the state g. Divisions are taken only
// when the numerator is nonzero, so the guard counter reflects divisions
// that actually happened.
FrozenCoeffs freeze(const SystemSpec& spec, const GapVector& g, double eps_den);
FrozenCoeffs freeze(const SystemSpec& spec, const GapVector& g, double eps_den,
                    std::span<const double> c);

// Project one d-dimensional Wiener increment onto the derived per-gap
// drivers: out[i] = <sigma row (i+1) - sigma row i, dW> / c[i], or 0 when
// c[i] vanishes.
std::vector<double> project_noise(const SystemSpec& spec, std::span<const double> c,
                                  std::span<const double> dW);

}  // namespace noncollide
