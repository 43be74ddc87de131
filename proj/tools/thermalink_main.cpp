// thermalink: steady states, dynamics and entanglement of two qubits driven
// by a narrow-band thermal source through a waveguide.

#include "thermalink/analytic.hpp"
#include "thermalink/bidirectional.hpp"
#include "thermalink/cfrac.hpp"
#include "thermalink/solvers.hpp"
#include "thermalink/stochastic.hpp"
#include "thermalink/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitPartialFailure = 3;

struct CommonArgs {
    std::string config;
    std::string route;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    std::string out;
    std::string format;
    std::vector<std::string> overrides;  // key=value parameter settings
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_route = true) {
    cmd->add_option("--config", args.config, "JSON configuration file");
    if (with_route) cmd->add_option("--route", args.route, "solver route");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; args.seed_set = true; },
        "master random seed");
    cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)");
    cmd->add_option("--out", args.out, "output path (default stdout)");
    cmd->add_option("--format", args.format, "csv | json");
    cmd->add_option("--set", args.overrides, "parameter override key=value (repeatable)");
}

thermalink::SweepSpec build_spec(const CommonArgs& args) {
    thermalink::SweepSpec spec;
    if (!args.config.empty()) spec = thermalink::load_sweep_spec(args.config);
    if (!args.route.empty()) spec.route = thermalink::route_from_string(args.route);
    if (args.seed_set) spec.seed = args.seed;
    if (args.workers > 0) spec.workers = args.workers;
    if (!args.out.empty()) spec.out_path = args.out;
    if (!args.format.empty()) {
        if (args.format != "csv" && args.format != "json")
            throw std::invalid_argument("format must be csv or json");
        spec.format = args.format;
    }
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must be key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const double value = std::stod(kv.substr(eq + 1));
        if (key == "phi") {
            if (!(spec.params.kappa > 0.0))
                throw std::invalid_argument("phi override requires kappa > 0 (set kappa first)");
            spec.params.n_th = 2.0 * value / spec.params.kappa;
        } else if (key == "gamma1") spec.params.gamma1 = value;
        else if (key == "gamma2") spec.params.gamma2 = value;
        else if (key == "kappa") spec.params.kappa = value;
        else if (key == "n_th") spec.params.n_th = value;
        else if (key == "delta1") spec.params.delta1 = value;
        else if (key == "delta2") spec.params.delta2 = value;
        else if (key == "gamma_phi") spec.params.gamma_phi = value;
        else if (key == "p_loss") spec.params.p_loss = value;
        else if (key == "fock_cutoff") spec.params.fock_cutoff = static_cast<int>(value);
        else if (key == "k0z1") spec.params.k0z1 = value;
        else if (key == "k0z2") spec.params.k0z2 = value;
        else throw std::invalid_argument("unknown parameter: " + key);
    }
    spec.params.validate();
    return spec;
}

void emit_records(const thermalink::SweepSpec& spec,
                  const std::vector<thermalink::ResultRecord>& records) {
    auto write = [&](std::ostream& os) {
        if (spec.format == "json")
            thermalink::write_json(os, records);
        else
            thermalink::write_csv(os, records);
    };
    if (spec.out_path.empty()) {
        write(std::cout);
    } else {
        std::ofstream out(spec.out_path);
        if (!out) throw std::runtime_error("cannot open output file " + spec.out_path);
        write(out);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermally driven two-qubit network simulator"};
    app.require_subcommand(1);

    CommonArgs steady_args, sweep_args, evolve_args, traj_args;
    double evolve_t_end = 10.0;
    int evolve_points = 200;
    double traj_t_end = 10.0;
    std::string figure_name, figure_dir = ".";
    std::uint64_t figure_seed = 1;
    int figure_workers = 0;
    std::uint64_t validate_seed = 1;
    int validate_workers = 0;

    CLI::App* steady = app.add_subcommand("steady", "single steady-state solve");
    add_common(steady, steady_args);

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over the config axes");
    add_common(sweep, sweep_args);

    CLI::App* evolve = app.add_subcommand("evolve", "time evolution from |00> (x) thermal");
    add_common(evolve, evolve_args);
    evolve->add_option("--t-end", evolve_t_end, "final time (units of the common rate)");
    evolve->add_option("--points", evolve_points, "output grid size");

    CLI::App* traj = app.add_subcommand("trajectory", "single stochastic trajectory");
    add_common(traj, traj_args, false);
    traj->add_option("--t-end", traj_t_end, "final time");

    CLI::App* figure = app.add_subcommand("figure", "emit the data grid behind a figure");
    figure->add_option("name", figure_name,
                       "fig2c|fig2d|fig3a|fig3b|fig3c|fig4a|fig4b|fig4c|fig4d|fig7a|fig7b")
        ->required();
    figure->add_option("--out-dir", figure_dir, "output directory");
    figure->add_option("--seed", figure_seed, "master random seed");
    figure->add_option("--workers", figure_workers, "worker threads");

    CLI::App* validate = app.add_subcommand("validate", "cross-route consistency checks");
    validate->add_option("--seed", validate_seed, "master random seed");
    validate->add_option("--workers", validate_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (steady->parsed()) {
            thermalink::SweepSpec spec = build_spec(steady_args);
            try {
                emit_records(spec, {thermalink::run_steady(spec)});
            } catch (const std::invalid_argument&) {
                throw;  // config-level problem
            } catch (const std::exception& e) {
                std::cerr << "solver failure: " << e.what() << "\n";
                return kExitSolverFailure;
            }
        } else if (sweep->parsed()) {
            thermalink::SweepSpec spec = build_spec(sweep_args);
            const thermalink::SweepResult res = thermalink::run_sweep(spec);
            emit_records(spec, res.records);
            if (res.failed > 0) {
                std::cerr << res.failed << " of " << res.records.size()
                          << " sweep points failed\n";
                return kExitPartialFailure;
            }
        } else if (evolve->parsed()) {
            thermalink::SweepSpec spec = build_spec(evolve_args);
            std::vector<double> t(evolve_points);
            for (int i = 0; i < evolve_points; ++i)
                t[i] = evolve_t_end * i / std::max(1, evolve_points - 1);
            std::vector<thermalink::Matrix> states;
            std::vector<std::array<double, 6>> se;
            try {
                if (spec.route == thermalink::Route::Stochastic) {
                    thermalink::EnsembleOptions opts;
                    opts.n_traj = spec.solver.n_traj;
                    opts.dt = spec.solver.dt;
                    opts.master_seed = spec.seed;
                    opts.workers = thermalink::worker_count_from_env(spec.workers);
                    opts.output_points = evolve_points;
                    const thermalink::TrajectoryEnsemble ens =
                        thermalink::ensemble_average(spec.params, evolve_t_end, opts);
                    t = ens.t;
                    states = ens.rho;
                    se = ens.pop_se;
                } else {
                    // exact Fock-space integration from |00> (x) thermal
                    thermalink::ModelParams p = spec.params;
                    if (p.fock_cutoff == 0)
                        p.fock_cutoff = std::max(
                            p.default_fock_cutoff(),
                            thermalink::fock_cutoff_for_tail(p.n_th, spec.solver.tail_tol));
                    const thermalink::Superoperator l =
                        p.has_positions() ? thermalink::build_bidirectional_liouvillian(p)
                                          : thermalink::build_full_liouvillian(p);
                    const int n_max = p.fock_cutoff;
                    const double nbar = p.n_th / 2.0;
                    thermalink::Matrix cav = thermalink::Matrix::Zero(n_max, n_max);
                    for (int n = 0; n < n_max; ++n)
                        cav(n, n) = std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
                    cav /= cav.trace();
                    thermalink::Matrix q0 = thermalink::Matrix::Zero(4, 4);
                    q0(0, 0) = 1.0;
                    const thermalink::Matrix rho0 = thermalink::kron(q0, cav);
                    const std::vector<thermalink::Matrix> full =
                        thermalink::evolve(l, rho0, t);
                    states.reserve(full.size());
                    for (const auto& r : full)
                        states.push_back(thermalink::partial_trace_cavity(r, n_max));
                }
            } catch (const std::exception& e) {
                std::cerr << "solver failure: " << e.what() << "\n";
                return kExitSolverFailure;
            }
            auto write = [&](std::ostream& os) {
                thermalink::write_timeseries_csv(os, t, states, se.empty() ? nullptr : &se);
            };
            if (spec.out_path.empty()) {
                write(std::cout);
            } else {
                std::ofstream out(spec.out_path);
                if (!out) throw std::runtime_error("cannot open " + spec.out_path);
                write(out);
            }
        } else if (traj->parsed()) {
            thermalink::SweepSpec spec = build_spec(traj_args);
            try {
                const double dt = spec.solver.dt > 0.0 ? spec.solver.dt : 0.002;
                const thermalink::OUPath path =
                    thermalink::sample_ou_path(spec.params, traj_t_end, dt, spec.seed, 0);
                thermalink::Matrix mu0 = thermalink::Matrix::Zero(4, 4);
                mu0(0, 0) = 1.0;
                const std::vector<thermalink::Matrix> mus =
                    thermalink::propagate_conditional(path, spec.params, mu0);
                auto write = [&](std::ostream& os) {
                    os << "t[1/angfreq],re_alpha[-],im_alpha[-],abs_alpha[-],rho_00[-],rho_T[-],"
                          "rho_S[-],rho_11[-]\n";
                    for (std::size_t k = 0; k < path.t.size(); ++k) {
                        const auto d = thermalink::triplet_singlet_transform(mus[k]);
                        char buf[256];
                        std::snprintf(buf, sizeof(buf),
                                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                                      path.t[k], path.alpha[k].real(), path.alpha[k].imag(),
                                      std::abs(path.alpha[k]), d.p00, d.pT, d.pS, d.p11);
                        os << buf;
                    }
                };
                if (spec.out_path.empty()) {
                    write(std::cout);
                } else {
                    std::ofstream out(spec.out_path);
                    if (!out) throw std::runtime_error("cannot open " + spec.out_path);
                    write(out);
                }
            } catch (const std::invalid_argument&) {
                throw;
            } catch (const std::exception& e) {
                std::cerr << "solver failure: " << e.what() << "\n";
                return kExitSolverFailure;
            }
        } else if (figure->parsed()) {
            try {
                const auto files =
                    thermalink::run_figure(figure_name, figure_dir, figure_seed, figure_workers);
                for (const auto& f : files) std::cout << f << "\n";
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfigError;
            } catch (const std::exception& e) {
                std::cerr << "solver failure: " << e.what() << "\n";
                return kExitSolverFailure;
            }
        } else if (validate->parsed()) {
            const bool ok = thermalink::run_validation(std::cout, validate_seed, validate_workers);
            if (!ok) return kExitSolverFailure;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}
