#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noncollide/config.hpp"
#include "noncollide/harness.hpp"
#include "noncollide/io.hpp"
#include "noncollide/parallel.hpp"
#include "noncollide/version.hpp"

namespace nc = noncollide;

namespace {

// exit codes: 0 ok, 1 validation failure, 2 bad arguments or config,
// 3 acceptance-band failure
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitBand = 3;

constexpr double kRateBand[2] = {0.4, 1.8};
constexpr double kMaxAbsZ = 4.0;

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    int workers = nc::default_workers();
    double eps_alpha = 1e-8;
    double eps_den = 1e-12;
    double eps_scale = 0.0;  // > 0 switches the guard to kappa*c*sqrt(dt)
    std::string out_dir = ".";
};

nc::SdOptions sd_options(const CommonArgs& a) {
    nc::SdOptions opt;
    opt.eps_alpha = a.eps_alpha;
    opt.guard = a.eps_scale > 0.0 ? nc::GuardPolicy::scaled(a.eps_scale)
                                  : nc::GuardPolicy::absolute(a.eps_den);
    return opt;
}

nc::SchemeKind parse_scheme(const std::string& s) {
    if (s == "sd-composed" || s == "sd") return nc::SchemeKind::SdComposed;
    if (s == "sd-per-step") return nc::SchemeKind::SdPerStep;
    if (s == "euler-maruyama" || s == "em") return nc::SchemeKind::EulerMaruyama;
    if (s == "tamed-euler" || s == "tamed") return nc::SchemeKind::TamedEuler;
    throw CLI::ValidationError("scheme", "unknown scheme '" + s + "'");
}

int load_and_validate(const CommonArgs& a, nc::SystemSpec& spec, bool print_report) {
    spec = nc::load_spec(a.config_path);
    const nc::ValidationReport rep = nc::validate(spec, false);
    if (print_report || !rep.ok) {
        for (const auto& v : rep.violations)
            std::cout << "violation " << v.rule << ": " << v.message << "\n";
        for (const auto& w : rep.warnings)
            std::cout << "warning " << w.rule << ": " << w.message << "\n";
    }
    return rep.ok ? kExitOk : kExitValidation;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    std::cout << "wrote " << path << "\n";
}

nc::Provenance provenance(const CommonArgs& a, const nc::SystemSpec& spec,
                          const std::string& scheme) {
    return nc::Provenance{a.seed, nc::spec_hash(spec), scheme, nc::kVersion};
}

int cmd_validate(const CommonArgs& a, bool strict) {
    const nc::SystemSpec spec = nc::load_spec(a.config_path);
    const nc::ValidationReport rep = nc::validate(spec, strict);
    for (const auto& v : rep.violations)
        std::cout << "violation " << v.rule << ": " << v.message << "\n";
    for (const auto& w : rep.warnings)
        std::cout << "warning " << w.rule << ": " << w.message << "\n";
    std::cout << "ok=" << (rep.ok ? "true" : "false") << " d=" << spec.d
              << " sigma_sq=" << nc::fmt17(rep.sigma_sq)
              << " gamma_sup=" << nc::fmt17(rep.gamma_sup) << " c=[";
    for (std::size_t i = 0; i < rep.c.size(); ++i)
        std::cout << (i ? "," : "") << nc::fmt17(rep.c[i]);
    std::cout << "]\n";
    return rep.ok ? kExitOk : kExitValidation;
}

int cmd_simulate(const CommonArgs& a, const std::string& scheme_str, int steps) {
    nc::SystemSpec spec;
    if (int rc = load_and_validate(a, spec, false); rc != kExitOk) return rc;
    if (!nc::is_power_of_two(steps)) {
        std::cerr << "error: --steps must be a power of two (grid constraint)\n";
        return kExitBadArgs;
    }
    const nc::SchemeKind kind = parse_scheme(scheme_str);
    const nc::BrownianGrid grid = nc::generate_grid(a.seed, 0, spec.d, steps, spec.horizon);
    const nc::Trajectory tr = nc::run_scheme(spec, grid, 1, kind, sd_options(a));
    write_file(a.out_dir, "trajectory.csv",
               nc::trajectory_csv(tr, provenance(a, spec, scheme_str)));
    if (tr.aborted)
        std::cout << "aborted at step " << tr.last_valid << " (non-finite state)\n";
    return kExitOk;
}

int cmd_convergence(const CommonArgs& a, const std::string& scheme_str, int paths, int n_fine,
                    const std::vector<int>& factors, int ref_factor) {
    nc::SystemSpec spec;
    if (int rc = load_and_validate(a, spec, false); rc != kExitOk) return rc;
    const nc::SchemeKind kind = parse_scheme(scheme_str);
    nc::ExperimentOptions opt;
    opt.seed = a.seed;
    opt.m_paths = paths;
    opt.n_fine = n_fine;
    opt.sd = sd_options(a);
    opt.workers = a.workers;
    nc::ConvergenceTable table;
    try {
        table = nc::strong_error(spec, kind, opt, factors, ref_factor);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    }
    const nc::Provenance p = provenance(a, spec, scheme_str);
    write_file(a.out_dir, "convergence.csv", nc::convergence_csv(table, p));
    write_file(a.out_dir, "convergence_summary.json",
               nc::convergence_summary_json(table, p, kRateBand));
    std::cout << "fitted_rate=" << nc::fmt17(table.fitted_rate)
              << " fitted_rate_gap=" << nc::fmt17(table.fitted_rate_gap) << "\n";
    const bool in_band =
        table.fitted_rate >= kRateBand[0] && table.fitted_rate <= kRateBand[1];
    return in_band ? kExitOk : kExitBand;
}

int cmd_compare(const CommonArgs& a, int paths, int n_fine, int factor) {
    nc::SystemSpec spec;
    if (int rc = load_and_validate(a, spec, false); rc != kExitOk) return rc;
    nc::ExperimentOptions opt;
    opt.seed = a.seed;
    opt.m_paths = paths;
    opt.n_fine = n_fine;
    opt.sd = sd_options(a);
    opt.workers = a.workers;
    std::vector<std::pair<nc::SchemeKind, nc::CollisionStats>> rows;
    for (nc::SchemeKind k : {nc::SchemeKind::SdComposed, nc::SchemeKind::EulerMaruyama,
                             nc::SchemeKind::TamedEuler}) {
        try {
            rows.emplace_back(k, nc::collision_stats(spec, k, opt, factor));
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitBadArgs;
        }
    }
    write_file(a.out_dir, "compare.csv", nc::compare_csv(rows, provenance(a, spec, "compare")));
    for (const auto& [k, st] : rows)
        std::cout << nc::scheme_name(k) << ": min_gap=" << nc::fmt17(st.min_gap)
                  << " violation_steps=" << st.violation_steps
                  << " aborted_paths=" << st.aborted_paths << "\n";
    return kExitOk;
}

int cmd_moment_check(const CommonArgs& a, int paths, int n_fine, double t_check) {
    nc::SystemSpec spec;
    if (int rc = load_and_validate(a, spec, false); rc != kExitOk) return rc;
    nc::ExperimentOptions opt;
    opt.seed = a.seed;
    opt.m_paths = paths;
    opt.n_fine = n_fine;
    opt.sd = sd_options(a);
    opt.workers = a.workers;
    nc::MomentReport rep;
    try {
        rep = nc::dyson_moment_check(spec, opt, t_check);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    }
    write_file(a.out_dir, "moment_check.json",
               nc::moment_report_json(rep, provenance(a, spec, "sd-composed")));
    std::cout << "z_mean_sq_norm=" << nc::fmt17(rep.z_mean_sq_norm)
              << " z_sum_mean=" << nc::fmt17(rep.z_sum_mean)
              << " z_sum_var=" << nc::fmt17(rep.z_sum_var) << "\n";
    const bool ok = std::abs(rep.z_mean_sq_norm) <= kMaxAbsZ &&
                    std::abs(rep.z_sum_mean) <= kMaxAbsZ && std::abs(rep.z_sum_var) <= kMaxAbsZ;
    return ok ? kExitOk : kExitBand;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and convergence harness for non-colliding particle SDE systems"};
    app.require_subcommand(1);

    CommonArgs common;
    bool strict = false;
    std::string scheme = "sd-composed";
    int steps = 1024, paths = 100, n_fine = 4096, ref_factor = 1, factor = 16;
    std::vector<int> factors;
    double t_check = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_seed) {
        sub->add_option("--config", common.config_path, "JSON system configuration")->required();
        if (needs_seed) sub->add_option("--seed", common.seed, "base RNG seed")->required();
        sub->add_option("--workers", common.workers, "max worker threads");
        sub->add_option("--eps-alpha", common.eps_alpha, "alpha->0 branch threshold on |alpha|*dt");
        sub->add_option("--eps-den", common.eps_den, "absolute denominator guard");
        sub->add_option("--eps-scale", common.eps_scale,
                        "use step-scaled guard kappa*max(c)*sqrt(dt) with this kappa");
        sub->add_option("--out", common.out_dir, "output directory");
    };

    CLI::App* v = app.add_subcommand("validate", "validate a system configuration");
    add_common(v, false);
    v->add_flag("--strict", strict, "treat convergence-theorem hypotheses as violations");

    CLI::App* sim = app.add_subcommand("simulate", "simulate one path, write trajectory CSV");
    add_common(sim, true);
    sim->add_option("--scheme", scheme, "sd-composed|sd-per-step|euler-maruyama|tamed-euler");
    sim->add_option("--steps", steps, "number of time steps (power of two)")->required();

    CLI::App* conv = app.add_subcommand("convergence", "coupled strong-error rate study");
    add_common(conv, true);
    conv->add_option("--scheme", scheme, "scheme under study");
    conv->add_option("--paths", paths, "Monte Carlo paths")->required();
    conv->add_option("--nfine", n_fine, "finest grid steps (power of two)")->required();
    conv->add_option("--factors", factors, "coarsening factors vs the fine grid")
        ->required()
        ->delimiter(',');
    conv->add_option("--ref", ref_factor, "reference coarsening factor");

    CLI::App* cmp = app.add_subcommand("compare", "collision statistics across schemes");
    add_common(cmp, true);
    cmp->add_option("--paths", paths, "Monte Carlo paths")->required();
    cmp->add_option("--nfine", n_fine, "finest grid steps (power of two)")->required();
    cmp->add_option("--factor", factor, "coarsening factor for all schemes")->required();

    CLI::App* mom = app.add_subcommand("moment-check", "Dyson closed-form moment identities");
    add_common(mom, true);
    mom->add_option("--paths", paths, "Monte Carlo paths")->required();
    mom->add_option("--nfine", n_fine, "grid steps (power of two)");
    mom->add_option("--t", t_check, "check time (grid time in (0, horizon])")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadArgs;
    }

    try {
        if (app.got_subcommand(v)) return cmd_validate(common, strict);
        if (app.got_subcommand(sim)) return cmd_simulate(common, scheme, steps);
        if (app.got_subcommand(conv))
            return cmd_convergence(common, scheme, paths, n_fine, factors, ref_factor);
        if (app.got_subcommand(cmp)) return cmd_compare(common, paths, n_fine, factor);
        if (app.got_subcommand(mom)) return cmd_moment_check(common, paths, n_fine, t_check);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    }
    return kExitBadArgs;
}
