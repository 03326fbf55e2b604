#include "noncollide/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noncollide/io.hpp"
#include "noncollide/parallel.hpp"

namespace noncollide {

LoglogFit fit_loglog(std::span<const double> dts, std::span<const double> means) {
    LoglogFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(means[i] > 0.0) || !std::isfinite(means[i])) continue;
        const double x = std::log2(dts[i]);
        const double y = std::log2(means[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    fit.points = n;
    if (n >= 2) {
        const double denom = n * sxx - sx * sx;
        fit.slope = (n * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / n;
    }
    return fit;
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};

// Accumulates in the provided (path-ascending) order for bitwise stability.
MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = static_cast<int>(xs.size());
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / r.n;
    if (r.n >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / (r.n - 1) / r.n);
    }
    return r;
}

// The gap state used by the error functional: auxiliary gaps for SD
// schemes, adjacent position differences for the baselines.
void gap_state(const Trajectory& tr, int n, std::vector<double>& out) {
    const int d = tr.d;
    out.resize(d);
    if (!tr.gaps_aux.empty()) {
        for (int i = 0; i < d; ++i) out[i] = tr.aux(n, i);
        return;
    }
    out[0] = tr.pos(n, 0);
    for (int i = 1; i < d; ++i) out[i] = tr.pos(n, i) - tr.pos(n, i - 1);
}

}  // namespace

ConvergenceTable strong_error(const SystemSpec& spec, SchemeKind kind,
                              const ExperimentOptions& opt, std::vector<int> factors,
                              int ref_factor) {
    if (opt.m_paths < 2) throw std::invalid_argument("strong_error: need at least 2 paths");
    std::sort(factors.begin(), factors.end(), std::greater<int>());
    for (int f : factors) {
        if (f <= ref_factor || f % ref_factor != 0)
            throw std::invalid_argument(
                "strong_error: ref_factor must strictly divide every factor");
        if (!is_power_of_two(f) || f > opt.n_fine || opt.n_fine % f != 0)
            throw std::invalid_argument("strong_error: factors must be powers of two dividing n_fine");
    }
    if (!is_power_of_two(ref_factor) || opt.n_fine % ref_factor != 0)
        throw std::invalid_argument("strong_error: ref_factor must be a power of two dividing n_fine");

    const int nf = static_cast<int>(factors.size());
    const int M = opt.m_paths;
    // per (path, factor) slots; reduced in path order afterwards
    std::vector<double> err(static_cast<std::size_t>(M) * nf, 0.0);
    std::vector<double> gap_err(static_cast<std::size_t>(M) * nf, 0.0);
    std::vector<std::uint8_t> dead(static_cast<std::size_t>(M) * nf, 0);

    parallel_for(M, opt.workers, [&](int p) {
        const BrownianGrid grid =
            generate_grid(opt.seed, static_cast<std::uint64_t>(p), spec.d, opt.n_fine, spec.horizon);
        const Trajectory ref = run_scheme(spec, grid, ref_factor, kind, opt.sd);
        std::vector<double> gc, gr;
        for (int fi = 0; fi < nf; ++fi) {
            const std::size_t slot = static_cast<std::size_t>(p) * nf + fi;
            if (ref.aborted) {
                dead[slot] = 1;
                continue;
            }
            const int f = factors[fi];
            const Trajectory coarse = run_scheme(spec, grid, f, kind, opt.sd);
            if (coarse.aborted) {
                dead[slot] = 1;
                continue;
            }
            const int stride = f / ref_factor;
            double e = 0.0, ge = 0.0;
            for (int m = 0; m <= coarse.steps(); ++m) {
                const int rm = m * stride;
                double d2 = 0.0;
                for (int i = 0; i < spec.d; ++i) {
                    const double diff = coarse.pos(m, i) - ref.pos(rm, i);
                    d2 += diff * diff;
                }
                e = std::max(e, d2);
                gap_state(coarse, m, gc);
                gap_state(ref, rm, gr);
                for (int i = 0; i < spec.d; ++i) {
                    const double diff = gc[i] - gr[i];
                    ge = std::max(ge, diff * diff);
                }
            }
            err[slot] = e;
            gap_err[slot] = ge;
        }
    });

    ConvergenceTable table;
    table.seed = opt.seed;
    table.m_paths = M;
    table.n_fine = opt.n_fine;
    table.ref_factor = ref_factor;
    table.kind = kind;

    std::vector<double> fit_dt, fit_err, fit_gap;
    std::vector<double> usable_err, usable_gap;
    for (int fi = 0; fi < nf; ++fi) {
        ConvergenceRow row;
        row.factor = factors[fi];
        row.dt = spec.horizon * factors[fi] / opt.n_fine;
        usable_err.clear();
        usable_gap.clear();
        for (int p = 0; p < M; ++p) {
            const std::size_t slot = static_cast<std::size_t>(p) * nf + fi;
            if (dead[slot]) {
                ++row.aborted;
            } else {
                usable_err.push_back(err[slot]);
                usable_gap.push_back(gap_err[slot]);
            }
        }
        const MeanSe e = mean_se(usable_err);
        const MeanSe g = mean_se(usable_gap);
        row.err_sq_mean = e.mean;
        row.err_sq_se = e.se;
        row.err_gap_sq_mean = g.mean;
        row.err_gap_sq_se = g.se;
        row.n_paths = e.n;
        row.usable = e.n >= 2;
        if (row.usable) {
            fit_dt.push_back(row.dt);
            fit_err.push_back(row.err_sq_mean);
            fit_gap.push_back(row.err_gap_sq_mean);
        }
        table.rows.push_back(row);
    }
    const LoglogFit fe = fit_loglog(fit_dt, fit_err);
    const LoglogFit fg = fit_loglog(fit_dt, fit_gap);
    table.fitted_rate = fe.slope;
    table.fitted_intercept = fe.intercept;
    table.fitted_rate_gap = fg.slope;
    table.fitted_intercept_gap = fg.intercept;
    return table;
}

LocalScalingTable local_error_scaling(const SystemSpec& spec, const ExperimentOptions& opt,
                                      std::vector<int> factors) {
    if (opt.m_paths < 2) throw std::invalid_argument("local_error_scaling: need at least 2 paths");
    std::sort(factors.begin(), factors.end(), std::greater<int>());
    const int nf = static_cast<int>(factors.size());
    const int M = opt.m_paths;
    std::vector<double> val(static_cast<std::size_t>(M) * nf, 0.0);
    std::vector<std::uint8_t> dead(static_cast<std::size_t>(M) * nf, 0);

    parallel_for(M, opt.workers, [&](int p) {
        const BrownianGrid grid =
            generate_grid(opt.seed, static_cast<std::uint64_t>(p), spec.d, opt.n_fine, spec.horizon);
        for (int fi = 0; fi < nf; ++fi) {
            const Trajectory tr = run_scheme(spec, grid, factors[fi], SchemeKind::SdComposed, opt.sd);
            const std::size_t slot = static_cast<std::size_t>(p) * nf + fi;
            if (tr.aborted) {
                dead[slot] = 1;
                continue;
            }
            double m = 0.0;
            for (int n = 0; n < tr.steps(); ++n)
                for (int i = 0; i < spec.d; ++i) {
                    const double inc = tr.aux(n + 1, i) - tr.aux(n, i);
                    m = std::max(m, inc * inc);
                }
            val[slot] = m;
        }
    });

    LocalScalingTable table;
    table.seed = opt.seed;
    table.m_paths = M;
    table.n_fine = opt.n_fine;
    std::vector<double> fit_dt, fit_mean, usable;
    for (int fi = 0; fi < nf; ++fi) {
        LocalScalingRow row;
        row.factor = factors[fi];
        row.dt = spec.horizon * factors[fi] / opt.n_fine;
        usable.clear();
        for (int p = 0; p < M; ++p) {
            const std::size_t slot = static_cast<std::size_t>(p) * nf + fi;
            if (dead[slot])
                ++row.aborted;
            else
                usable.push_back(val[slot]);
        }
        const MeanSe m = mean_se(usable);
        row.mean = m.mean;
        row.se = m.se;
        row.n_paths = m.n;
        if (m.n >= 2) {
            fit_dt.push_back(row.dt);
            fit_mean.push_back(row.mean);
        }
        table.rows.push_back(row);
    }
    const LoglogFit f = fit_loglog(fit_dt, fit_mean);
    table.fitted_rate = f.slope;
    table.fitted_intercept = f.intercept;
    return table;
}

CollisionStats collision_stats(const SystemSpec& spec, SchemeKind kind,
                               const ExperimentOptions& opt, int factor) {
    const int M = opt.m_paths;
    std::vector<double> min_gap(M, std::numeric_limits<double>::infinity());
    std::vector<long> violations(M, 0);
    std::vector<std::uint8_t> dead(M, 0);

    parallel_for(M, opt.workers, [&](int p) {
        const BrownianGrid grid =
            generate_grid(opt.seed, static_cast<std::uint64_t>(p), spec.d, opt.n_fine, spec.horizon);
        const Trajectory tr = run_scheme(spec, grid, factor, kind, opt.sd);
        dead[p] = tr.aborted ? 1 : 0;
        violations[p] = tr.ordering_violations;
        double mg = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= tr.last_valid; ++n)
            for (int i = 1; i < spec.d; ++i)
                mg = std::min(mg, tr.pos(n, i) - tr.pos(n, i - 1));
        min_gap[p] = mg;
    });

    CollisionStats st;
    st.n_paths = M;
    st.min_gap = std::numeric_limits<double>::infinity();
    for (int p = 0; p < M; ++p) {
        st.min_gap = std::min(st.min_gap, min_gap[p]);
        st.violation_steps += violations[p];
        st.aborted_paths += dead[p];
    }
    return st;
}

namespace {

bool is_dyson_form(const SystemSpec& spec) {
    if (spec.drift.kind != DriftKind::Zero) return false;
    const double g = spec.gamma(0, 1);
    for (int i = 0; i < spec.d; ++i)
        for (int j = 0; j < spec.d; ++j) {
            if (i != j && spec.gamma(i, j) != g) return false;
            if (i != j && spec.sigma(i, j) != 0.0) return false;
        }
    return true;
}

}  // namespace

MomentReport dyson_moment_check(const SystemSpec& spec, const ExperimentOptions& opt,
                                double t_check) {
    if (!is_dyson_form(spec))
        throw std::invalid_argument(
            "dyson_moment_check: spec must be Dyson form (scalar gamma, diagonal sigma, zero drift)");
    if (!(t_check > 0.0) || t_check > spec.horizon)
        throw std::invalid_argument("dyson_moment_check: t_check must lie in (0, horizon]");
    const double dt = spec.horizon / opt.n_fine;
    const double steps_real = t_check / dt;
    const int n_check = static_cast<int>(std::llround(steps_real));
    if (std::fabs(steps_real - n_check) > 1e-9)
        throw std::invalid_argument("dyson_moment_check: t_check must be a grid time");

    const int M = opt.m_paths;
    const int d = spec.d;
    std::vector<double> sq_norm(M, 0.0), sums(M, 0.0);
    std::vector<std::uint8_t> dead(M, 0);

    parallel_for(M, opt.workers, [&](int p) {
        const BrownianGrid grid =
            generate_grid(opt.seed, static_cast<std::uint64_t>(p), spec.d, opt.n_fine, spec.horizon);
        const Trajectory tr = run_scheme(spec, grid, 1, SchemeKind::SdComposed, opt.sd);
        if (tr.aborted && tr.last_valid < n_check) {
            dead[p] = 1;
            return;
        }
        double nsq = 0.0, s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double x = tr.pos(n_check, i);
            nsq += x * x;
            s += x;
        }
        sq_norm[p] = nsq;
        sums[p] = s;
    });

    std::vector<double> ns, ss;
    ns.reserve(M);
    ss.reserve(M);
    long aborted = 0;
    for (int p = 0; p < M; ++p) {
        if (dead[p]) {
            ++aborted;
            continue;
        }
        ns.push_back(sq_norm[p]);
        ss.push_back(sums[p]);
    }

    MomentReport rep;
    rep.t_check = t_check;
    rep.aborted_paths = aborted;

    const double gamma = spec.gamma(0, 1);
    double sum_sigma_sq = 0.0, x0_sq = 0.0, x0_sum = 0.0;
    for (int i = 0; i < d; ++i) {
        sum_sigma_sq += spec.sigma(i, i) * spec.sigma(i, i);
        x0_sq += spec.x0[i] * spec.x0[i];
        x0_sum += spec.x0[i];
    }
    double col_sq = 0.0;
    for (int j = 0; j < d; ++j) {
        double col = 0.0;
        for (int i = 0; i < d; ++i) col += spec.sigma(i, j);
        col_sq += col * col;
    }
    rep.theoretical_mean_sq_norm = x0_sq + (gamma * d * (d - 1) + sum_sigma_sq) * t_check;
    rep.sum_theoretical_mean = x0_sum;
    rep.sum_theoretical_var = t_check * col_sq;

    const MeanSe mn = mean_se(ns);
    rep.empirical_mean_sq_norm = mn.mean;
    rep.mean_sq_norm_se = mn.se;
    rep.z_mean_sq_norm = mn.se > 0 ? (mn.mean - rep.theoretical_mean_sq_norm) / mn.se : 0.0;

    const MeanSe ms = mean_se(ss);
    rep.sum_mean = ms.mean;
    rep.sum_mean_se = ms.se;
    rep.z_sum_mean = ms.se > 0 ? (ms.mean - rep.sum_theoretical_mean) / ms.se : 0.0;

    const int n = static_cast<int>(ss.size());
    if (n >= 4) {
        double m2 = 0.0, m4 = 0.0;
        for (double s : ss) {
            const double c = s - ms.mean;
            m2 += c * c;
            m4 += c * c * c * c;
        }
        const double var = m2 / (n - 1);
        m4 /= n;
        // large-sample standard error of the sample variance
        const double var_of_var = (m4 - var * var * (n - 3.0) / (n - 1.0)) / n;
        rep.sum_var = var;
        rep.sum_var_se = var_of_var > 0 ? std::sqrt(var_of_var) : 0.0;
        rep.z_sum_var =
            rep.sum_var_se > 0 ? (var - rep.sum_theoretical_var) / rep.sum_var_se : 0.0;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// artifact writers

std::string convergence_csv(const ConvergenceTable& t, const Provenance& p) {
    std::string out = provenance_header(p);
    out += "dt,err_sq_mean,err_sq_se,err_gap_sq_mean,n_paths,aborted\n";
    for (const auto& r : t.rows) {
        out += fmt17(r.dt) + "," + fmt17(r.err_sq_mean) + "," + fmt17(r.err_sq_se) + "," +
               fmt17(r.err_gap_sq_mean) + "," + std::to_string(r.n_paths) + "," +
               std::to_string(r.aborted) + "\n";
    }
    return out;
}

std::string convergence_summary_json(const ConvergenceTable& t, const Provenance& p,
                                     std::span<const double> band) {
    std::string out = "{\n";
    out += "  \"fitted_rate\": " + fmt17(t.fitted_rate) + ",\n";
    out += "  \"fitted_intercept\": " + fmt17(t.fitted_intercept) + ",\n";
    out += "  \"fitted_rate_gap\": " + fmt17(t.fitted_rate_gap) + ",\n";
    out += "  \"fitted_intercept_gap\": " + fmt17(t.fitted_intercept_gap) + ",\n";
    out += "  \"seed\": " + std::to_string(t.seed) + ",\n";
    out += "  \"spec_sha256\": \"" + p.spec_hash + "\",\n";
    out += "  \"scheme\": \"" + p.scheme + "\",\n";
    out += "  \"version\": \"" + p.version + "\",\n";
    out += "  \"n_paths\": " + std::to_string(t.m_paths) + ",\n";
    out += "  \"n_fine\": " + std::to_string(t.n_fine) + ",\n";
    out += "  \"ref_factor\": " + std::to_string(t.ref_factor) + ",\n";
    out += "  \"factors\": [";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(t.rows[i].factor);
    }
    out += "],\n";
    out += "  \"acceptance_band\": [" + fmt17(band[0]) + ", " + fmt17(band[1]) + "],\n";
    const bool in_band = t.fitted_rate >= band[0] && t.fitted_rate <= band[1];
    out += std::string("  \"rate_in_band\": ") + (in_band ? "true" : "false") + "\n";
    out += "}\n";
    return out;
}

std::string local_scaling_csv(const LocalScalingTable& t, const Provenance& p) {
    std::string out = provenance_header(p);
    out += "dt,max_inc_sq_mean,max_inc_sq_se,n_paths,aborted\n";
    for (const auto& r : t.rows) {
        out += fmt17(r.dt) + "," + fmt17(r.mean) + "," + fmt17(r.se) + "," +
               std::to_string(r.n_paths) + "," + std::to_string(r.aborted) + "\n";
    }
    return out;
}

std::string compare_csv(std::span<const std::pair<SchemeKind, CollisionStats>> rows,
                        const Provenance& p) {
    std::string out = provenance_header(p);
    out += "scheme,min_gap,violation_steps,aborted_paths,n_paths\n";
    for (const auto& [kind, st] : rows) {
        out += std::string(scheme_name(kind)) + "," + fmt17(st.min_gap) + "," +
               std::to_string(st.violation_steps) + "," + std::to_string(st.aborted_paths) + "," +
               std::to_string(st.n_paths) + "\n";
    }
    return out;
}

std::string moment_report_json(const MomentReport& r, const Provenance& p) {
    std::string out = "{\n";
    out += "  \"t_check\": " + fmt17(r.t_check) + ",\n";
    out += "  \"mean_sq_norm\": {\"empirical\": " + fmt17(r.empirical_mean_sq_norm) +
           ", \"se\": " + fmt17(r.mean_sq_norm_se) +
           ", \"theoretical\": " + fmt17(r.theoretical_mean_sq_norm) +
           ", \"z\": " + fmt17(r.z_mean_sq_norm) + "},\n";
    out += "  \"sum_mean\": {\"empirical\": " + fmt17(r.sum_mean) +
           ", \"se\": " + fmt17(r.sum_mean_se) +
           ", \"theoretical\": " + fmt17(r.sum_theoretical_mean) +
           ", \"z\": " + fmt17(r.z_sum_mean) + "},\n";
    out += "  \"sum_var\": {\"empirical\": " + fmt17(r.sum_var) +
           ", \"se\": " + fmt17(r.sum_var_se) +
           ", \"theoretical\": " + fmt17(r.sum_theoretical_var) +
           ", \"z\": " + fmt17(r.z_sum_var) + "},\n";
    out += "  \"aborted_paths\": " + std::to_string(r.aborted_paths) + ",\n";
    out += "  \"seed\": " + std::to_string(p.seed) + ",\n";
    out += "  \"spec_sha256\": \"" + p.spec_hash + "\",\n";
    out += "  \"scheme\": \"" + p.scheme + "\",\n";
    out += "  \"version\": \"" + p.version + "\"\n";
    out += "}\n";
    return out;
}

std::string trajectory_csv(const Trajectory& tr, const Provenance& p) {
    std::string out = provenance_header(p);
    out += "# aborted=" + std::to_string(tr.aborted ? 1 : 0) +
           " last_valid=" + std::to_string(tr.last_valid) +
           " guard_activations=" + std::to_string(tr.guard_activations) +
           " ordering_violations=" + std::to_string(tr.ordering_violations) + "\n";
    out += "t,i,position,gap_aux,gap_pos,ordered\n";
    const bool sd = !tr.gaps_aux.empty();
    for (int n = 0; n <= tr.last_valid; ++n) {
        for (int i = 0; i < tr.d; ++i) {
            out += fmt17(tr.times[n]) + "," + std::to_string(i + 1) + "," +
                   fmt17(tr.pos(n, i)) + ",";
            out += sd ? fmt17(tr.aux(n, i)) : "nan";
            out += ",";
            out += sd ? fmt17(tr.gap(n, i)) : "nan";
            out += ",";
            out += tr.ordered[n] ? "1" : "0";
            out += "\n";
        }
    }
    return out;
}

}  // namespace noncollide
