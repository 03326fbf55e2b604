#include "noncollide/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noncollide {

const char* scheme_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::SdComposed: return "sd-composed";
        case SchemeKind::SdPerStep: return "sd-per-step";
        case SchemeKind::EulerMaruyama: return "euler-maruyama";
        case SchemeKind::TamedEuler: return "tamed-euler";
    }
    return "?";
}

bool is_sd(SchemeKind k) {
    return k == SchemeKind::SdComposed || k == SchemeKind::SdPerStep;
}

double GuardPolicy::eps_for(const SystemSpec& spec, double dt) const {
    if (mode == Mode::Absolute) return eps_den;
    const std::vector<double> c = compute_c(spec);
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, v);
    return kappa * cmax * std::sqrt(dt);
}

double sd_gap_update(double gap, double alpha, double beta, double c, double dB, double dt,
                     double eps_alpha) {
    const double x = alpha * dt;
    if (std::fabs(x) >= eps_alpha) {
        // exp(a dt) (D - (b/a)(1 - exp(-a dt)) + c exp(-a dt) dB) with the
        // outer factor distributed through; identical algebra, and the
        // noise term stays exactly c dB instead of inf * 0 for large |a| dt
        return std::exp(x) * gap - (beta / alpha) * std::expm1(x) + c * dB;
    }
    return gap - beta * dt + c * dB;
}

GapVector sd_step(const SystemSpec& spec, const GapVector& state, double /*t_n*/, double dt,
                  std::span<const double> dW, double eps_alpha, double eps_den,
                  long* guard_hits) {
    const FrozenCoeffs fc = freeze(spec, state, eps_den);
    if (guard_hits) *guard_hits += fc.guard_hits;
    const std::vector<double> dB = project_noise(spec, fc.c, dW);

    GapVector next(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
        next[i] = sd_gap_update(state[i], fc.alpha[i], fc.beta[i], fc.c[i], dB[i], dt, eps_alpha);
    return next;
}

GapVector sd_transform(const GapVector& aux, const SystemSpec& spec, double t, double dt,
                       SchemeKind kind) {
    const double s = (kind == SchemeKind::SdPerStep) ? dt : t;
    GapVector out(aux.size());
    out[0] = aux[0];
    for (std::size_t i = 1; i < aux.size(); ++i) {
        const double four_gamma_s = 4.0 * spec.gamma(static_cast<int>(i) - 1, static_cast<int>(i)) * s;
        out[i] = std::sqrt(aux[i] * aux[i] + four_gamma_s);
    }
    return out;
}

std::vector<double> em_drift(const SystemSpec& spec, std::span<const double> x) {
    const int d = spec.d;
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) {
        double s = drift_eval(spec, i, x[i]);
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            s += spec.gamma(i, j) / (x[i] - x[j]);
        }
        out[i] = s;
    }
    return out;
}

namespace {

std::vector<double> add_noise(const SystemSpec& spec, std::span<const double> x,
                              std::span<const double> displacement,
                              std::span<const double> dW) {
    const int d = spec.d;
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) {
        double noise = 0.0;
        for (int j = 0; j < d; ++j) noise += spec.sigma(i, j) * dW[j];
        out[i] = x[i] + displacement[i] + noise;
    }
    return out;
}

bool strictly_increasing(std::span<const double> x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) return false;
    return true;
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

void check_run_pre(const SystemSpec& spec, const BrownianGrid& grid, int factor) {
    if (grid.d != spec.d) throw std::invalid_argument("run: grid dimension mismatch");
    if (!is_power_of_two(factor) || factor > grid.n_fine || grid.n_fine % factor != 0)
        throw std::invalid_argument("run: factor must be a power of two dividing n_fine");
}

}  // namespace

std::vector<double> em_step(const SystemSpec& spec, std::span<const double> x, double dt,
                            std::span<const double> dW) {
    std::vector<double> disp = em_drift(spec, x);
    for (double& v : disp) v *= dt;
    return add_noise(spec, x, disp, dW);
}

std::vector<double> tamed_step(const SystemSpec& spec, std::span<const double> x, double dt,
                               std::span<const double> dW) {
    std::vector<double> drift = em_drift(spec, x);
    double norm_sq = 0.0;
    for (double v : drift) norm_sq += v * v;
    const double taming = dt / (1.0 + dt * std::sqrt(norm_sq));
    for (double& v : drift) v *= taming;
    return add_noise(spec, x, drift, dW);
}

Trajectory run_sd(const SystemSpec& spec, const BrownianGrid& grid, int factor, SchemeKind kind,
                  const SdOptions& opt) {
    check_run_pre(spec, grid, factor);
    const int d = spec.d;
    const int n_steps = grid.n_fine / factor;
    const double dt = grid.dt_fine * factor;
    const double eps_den = opt.guard.eps_for(spec, dt);
    const std::vector<double> dw = coarsen(grid, factor);
    const std::vector<double> c = compute_c(spec);

    Trajectory tr;
    tr.d = d;
    tr.times.resize(n_steps + 1);
    tr.positions.assign(static_cast<std::size_t>(n_steps + 1) * d, 0.0);
    tr.gaps_aux.assign(static_cast<std::size_t>(n_steps + 1) * d, 0.0);
    tr.gaps_pos.assign(static_cast<std::size_t>(n_steps + 1) * d, 0.0);
    tr.ordered.assign(n_steps + 1, 0);

    GapVector aux(d);
    aux[0] = spec.x0[0];
    for (int i = 1; i < d; ++i) aux[i] = spec.x0[i] - spec.x0[i - 1];

    auto record = [&](int n, const GapVector& a, const GapVector& gpos) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            tr.gaps_aux[static_cast<std::size_t>(n) * d + i] = a[i];
            tr.gaps_pos[static_cast<std::size_t>(n) * d + i] = gpos[i];
            acc += gpos[i];
            tr.positions[static_cast<std::size_t>(n) * d + i] = acc;
        }
        std::span<const double> row(&tr.positions[static_cast<std::size_t>(n) * d], d);
        tr.ordered[n] = strictly_increasing(row) ? 1 : 0;
        if (n >= 1 && !tr.ordered[n]) ++tr.ordering_violations;
    };

    tr.times[0] = 0.0;
    record(0, aux, aux);  // initial gaps are the x0 differences, already positive
    tr.last_valid = 0;

    for (int n = 0; n < n_steps; ++n) {
        const double t_n = n * dt;
        std::span<const double> dW(&dw[static_cast<std::size_t>(n) * d], d);
        GapVector next = sd_step(spec, aux, t_n, dt, dW, opt.eps_alpha, eps_den,
                                 &tr.guard_activations);
        tr.times[n + 1] = (n + 1) * dt;
        if (!all_finite(next)) {
            tr.aborted = true;
            break;
        }
        aux = std::move(next);
        GapVector gpos = sd_transform(aux, spec, tr.times[n + 1], dt, kind);
        record(n + 1, aux, gpos);
        tr.last_valid = n + 1;
    }
    return tr;
}

namespace {

Trajectory run_baseline(const SystemSpec& spec, const BrownianGrid& grid, int factor,
                        bool tamed) {
    check_run_pre(spec, grid, factor);
    const int d = spec.d;
    const int n_steps = grid.n_fine / factor;
    const double dt = grid.dt_fine * factor;
    const std::vector<double> dw = coarsen(grid, factor);

    Trajectory tr;
    tr.d = d;
    tr.times.resize(n_steps + 1);
    tr.positions.assign(static_cast<std::size_t>(n_steps + 1) * d, 0.0);
    tr.ordered.assign(n_steps + 1, 0);

    std::vector<double> x = spec.x0;
    auto record = [&](int n) {
        for (int i = 0; i < d; ++i) tr.positions[static_cast<std::size_t>(n) * d + i] = x[i];
        tr.ordered[n] = strictly_increasing(x) ? 1 : 0;
        if (n >= 1 && !tr.ordered[n]) ++tr.ordering_violations;
    };
    tr.times[0] = 0.0;
    record(0);
    tr.last_valid = 0;

    for (int n = 0; n < n_steps; ++n) {
        std::span<const double> dW(&dw[static_cast<std::size_t>(n) * d], d);
        std::vector<double> next =
            tamed ? tamed_step(spec, x, dt, dW) : em_step(spec, x, dt, dW);
        tr.times[n + 1] = (n + 1) * dt;
        if (!all_finite(next)) {
            tr.aborted = true;
            break;
        }
        x = std::move(next);
        record(n + 1);
        tr.last_valid = n + 1;
    }
    return tr;
}

}  // namespace

Trajectory run_em(const SystemSpec& spec, const BrownianGrid& grid, int factor) {
    return run_baseline(spec, grid, factor, false);
}

Trajectory run_tamed(const SystemSpec& spec, const BrownianGrid& grid, int factor) {
    return run_baseline(spec, grid, factor, true);
}

Trajectory run_scheme(const SystemSpec& spec, const BrownianGrid& grid, int factor,
                      SchemeKind kind, const SdOptions& opt) {
    switch (kind) {
        case SchemeKind::SdComposed:
        case SchemeKind::SdPerStep: return run_sd(spec, grid, factor, kind, opt);
        case SchemeKind::EulerMaruyama: return run_em(spec, grid, factor);
        case SchemeKind::TamedEuler: return run_tamed(spec, grid, factor);
    }
    throw std::invalid_argument("run_scheme: unknown scheme");
}

}  // namespace noncollide
