#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noncollide/brownian.hpp"
#include "noncollide/coeffs.hpp"
#include "noncollide/model.hpp"

namespace noncollide {

enum class SchemeKind { SdComposed, SdPerStep, EulerMaruyama, TamedEuler };

const char* scheme_name(SchemeKind k);
bool is_sd(SchemeKind k);

// How the denominator guard of the frozen coefficients is sized.
//   Absolute:   eps_den fixed (the literal per-step scheme; the default).
//   StepScaled: eps_den = kappa * max_i c_i * sqrt(dt). Pairwise auxiliary
//     differences are regularized at the step's own noise resolution, which
//     uniformly bounds |alpha|*dt and vanishes as dt -> 0. Without it the
//     frozen 1/(Y^{i+1,k} Y^{i,k}) terms, sampled at unconstrained auxiliary
//     states, produce exp(alpha dt) factors with heavy (empirically
//     infinite-variance) tails for d >= 3.
struct GuardPolicy {
    enum class Mode { Absolute, StepScaled };
    Mode mode = Mode::Absolute;
    double eps_den = 1e-12;
    double kappa = 0.5;

    double eps_for(const SystemSpec& spec, double dt) const;

    static GuardPolicy absolute(double eps) { return {Mode::Absolute, eps, 0.0}; }
    static GuardPolicy scaled(double kappa) { return {Mode::StepScaled, 0.0, kappa}; }
};

struct SdOptions {
    double eps_alpha = 1e-8;  // |alpha|*dt below this uses the alpha->0 limit branch
    GuardPolicy guard;        // defaults to the literal absolute guard at 1e-12
};

// Time-indexed output of one path. positions is (N+1) x d row-major; the
// gap matrices are filled for SD schemes only. ordered[n] says whether the
// positions at grid index n are strictly increasing.
struct Trajectory {
    int d = 0;
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> gaps_aux;
    std::vector<double> gaps_pos;
    std::vector<std::uint8_t> ordered;
    long guard_activations = 0;
    long ordering_violations = 0;  // grid indices n >= 1 with non-ordered positions
    bool aborted = false;
    int last_valid = 0;  // last grid index with finite state when aborted

    int steps() const { return static_cast<int>(times.size()) - 1; }
    double pos(int n, int i) const { return positions[static_cast<std::size_t>(n) * d + i]; }
    double aux(int n, int i) const { return gaps_aux[static_cast<std::size_t>(n) * d + i]; }
    double gap(int n, int i) const { return gaps_pos[static_cast<std::size_t>(n) * d + i]; }
};

// One gap component of the exact solution of the frozen linear SDE over a
// step: exp(a dt) D - (b/a)(exp(a dt) - 1) + c dB, with the first-order
// limit D - b dt + c dB taken when |a| dt < eps_alpha.
double sd_gap_update(double gap, double alpha, double beta, double c, double dB, double dt,
                     double eps_alpha);

// One step of the semi-discrete method on the auxiliary gaps. All
// components use coefficients frozen at the same incoming state. t_n is
// the time at the start of the step (kept for symmetry with run_sd's
// bookkeeping; the frozen update itself is time-homogeneous).
GapVector sd_step(const SystemSpec& spec, const GapVector& state, double t_n, double dt,
                  std::span<const double> dW, double eps_alpha, double eps_den,
                  long* guard_hits = nullptr);

// Square-root recombination producing the positive gaps. s = t for
// SdComposed, s = dt for SdPerStep; gap 0 (the first particle) passes
// through untransformed.
GapVector sd_transform(const GapVector& aux, const SystemSpec& spec, double t, double dt,
                       SchemeKind kind);

// Brute-force drift of the original system at positions x.
std::vector<double> em_drift(const SystemSpec& spec, std::span<const double> x);

// One Euler-Maruyama / tamed-Euler step on positions.
std::vector<double> em_step(const SystemSpec& spec, std::span<const double> x, double dt,
                            std::span<const double> dW);
std::vector<double> tamed_step(const SystemSpec& spec, std::span<const double> x, double dt,
                               std::span<const double> dW);

Trajectory run_sd(const SystemSpec& spec, const BrownianGrid& grid, int factor, SchemeKind kind,
                  const SdOptions& opt = {});
Trajectory run_em(const SystemSpec& spec, const BrownianGrid& grid, int factor);
Trajectory run_tamed(const SystemSpec& spec, const BrownianGrid& grid, int factor);
Trajectory run_scheme(const SystemSpec& spec, const BrownianGrid& grid, int factor,
                      SchemeKind kind, const SdOptions& opt = {});

}  // namespace noncollide
