#include "thermalink/sweep.hpp"

#include "thermalink/analytic.hpp"
#include "thermalink/bidirectional.hpp"
#include "thermalink/cfrac.hpp"
#include "thermalink/solvers.hpp"
#include "thermalink/stochastic.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace thermalink {

using nlohmann::json;

Route route_from_string(const std::string& name) {
    if (name == "exact") return Route::Exact;
    if (name == "stochastic") return Route::Stochastic;
    if (name == "bourret") return Route::Bourret;
    if (name == "cfrac") return Route::Cfrac;
    if (name == "quasistatic") return Route::Quasistatic;
    if (name == "markov") return Route::Markov;
    if (name == "phase-diffusion") return Route::PhaseDiffusion;
    if (name == "bidirectional") return Route::Bidirectional;
    throw std::invalid_argument("unknown route: " + name);
}

std::string route_name(Route route) {
    switch (route) {
        case Route::Exact: return "exact";
        case Route::Stochastic: return "stochastic";
        case Route::Bourret: return "bourret";
        case Route::Cfrac: return "cfrac";
        case Route::Quasistatic: return "quasistatic";
        case Route::Markov: return "markov";
        case Route::PhaseDiffusion: return "phase-diffusion";
        case Route::Bidirectional: return "bidirectional";
    }
    return "?";
}

std::vector<double> AxisSpec::values() const {
    if (points < 1) throw std::invalid_argument("axis " + param + ": points must be >= 1");
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = min;
        return v;
    }
    if (scale == "log") {
        if (!(min > 0.0) || !(max > 0.0))
            throw std::invalid_argument("axis " + param + ": log scale needs positive bounds");
        const double l0 = std::log(min), l1 = std::log(max);
        for (int i = 0; i < points; ++i)
            v[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
    } else if (scale == "linear") {
        for (int i = 0; i < points; ++i) v[i] = min + (max - min) * i / (points - 1);
    } else {
        throw std::invalid_argument("axis " + param + ": unknown scale " + scale);
    }
    return v;
}

namespace {

const std::vector<std::string> kParamKeys = {
    "gamma1", "gamma2", "kappa", "n_th",      "delta1", "delta2",
    "gamma_phi", "p_loss", "fock_cutoff", "k0z1", "k0z2"};

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

ModelParams parse_params(const json& obj) {
    reject_unknown_keys(obj, kParamKeys, "params");
    ModelParams p;
    if (obj.contains("gamma1")) p.gamma1 = obj["gamma1"].get<double>();
    if (obj.contains("gamma2")) p.gamma2 = obj["gamma2"].get<double>();
    if (obj.contains("kappa")) p.kappa = obj["kappa"].get<double>();
    if (obj.contains("n_th")) p.n_th = obj["n_th"].get<double>();
    if (obj.contains("delta1")) p.delta1 = obj["delta1"].get<double>();
    if (obj.contains("delta2")) p.delta2 = obj["delta2"].get<double>();
    if (obj.contains("gamma_phi")) p.gamma_phi = obj["gamma_phi"].get<double>();
    if (obj.contains("p_loss")) p.p_loss = obj["p_loss"].get<double>();
    if (obj.contains("fock_cutoff")) p.fock_cutoff = obj["fock_cutoff"].get<int>();
    if (obj.contains("k0z1")) p.k0z1 = obj["k0z1"].get<double>();
    if (obj.contains("k0z2")) p.k0z2 = obj["k0z2"].get<double>();
    p.validate();
    return p;
}

void set_param(ModelParams& p, const std::string& name, double value) {
    if (name == "gamma1") p.gamma1 = value;
    else if (name == "gamma2") p.gamma2 = value;
    else if (name == "kappa") p.kappa = value;
    else if (name == "n_th") p.n_th = value;
    else if (name == "delta1") p.delta1 = value;
    else if (name == "delta2") p.delta2 = value;
    else if (name == "gamma_phi") p.gamma_phi = value;
    else if (name == "p_loss") p.p_loss = value;
    else if (name == "fock_cutoff") p.fock_cutoff = static_cast<int>(value);
    else if (name == "k0z1") p.k0z1 = value;
    else if (name == "k0z2") p.k0z2 = value;
    else if (name == "phi") { /* applied after kappa; handled by caller */ }
    else throw std::invalid_argument("unknown parameter name: " + name);
}

bool is_axis_param(const std::string& name) {
    if (name == "phi") return true;
    for (const auto& k : kParamKeys)
        if (k == name) return true;
    return false;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown_keys(doc,
                        {"schema_version", "route", "params", "axes", "seed", "workers", "out",
                         "format", "solver"},
                        "top level");
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");

    SweepSpec spec;
    if (doc.contains("route")) spec.route = route_from_string(doc["route"].get<std::string>());
    if (doc.contains("params")) spec.params = parse_params(doc["params"]);
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("workers")) spec.workers = doc["workers"].get<int>();
    if (doc.contains("out")) spec.out_path = doc["out"].get<std::string>();
    if (doc.contains("format")) {
        spec.format = doc["format"].get<std::string>();
        if (spec.format != "csv" && spec.format != "json")
            throw std::invalid_argument("config: format must be csv or json");
    }
    if (doc.contains("axes")) {
        for (const auto& a : doc["axes"]) {
            reject_unknown_keys(a, {"param", "scale", "min", "max", "points"}, "axes[]");
            AxisSpec ax;
            ax.param = a.at("param").get<std::string>();
            if (!is_axis_param(ax.param))
                throw std::invalid_argument("config: axis over unknown parameter " + ax.param);
            if (a.contains("scale")) ax.scale = a["scale"].get<std::string>();
            ax.min = a.at("min").get<double>();
            ax.max = a.at("max").get<double>();
            ax.points = a.at("points").get<int>();
            if (ax.points < 1) throw std::invalid_argument("config: axis points must be >= 1");
            spec.axes.push_back(std::move(ax));
        }
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        reject_unknown_keys(s,
                            {"n_traj", "t_end", "dt", "steady_window", "tail_tol",
                             "max_hilbert_dim", "n_max", "r0"},
                            "solver");
        if (s.contains("n_traj")) spec.solver.n_traj = s["n_traj"].get<int>();
        if (s.contains("t_end")) spec.solver.t_end = s["t_end"].get<double>();
        if (s.contains("dt")) spec.solver.dt = s["dt"].get<double>();
        if (s.contains("steady_window")) spec.solver.steady_window = s["steady_window"].get<double>();
        if (s.contains("tail_tol")) spec.solver.tail_tol = s["tail_tol"].get<double>();
        if (s.contains("max_hilbert_dim"))
            spec.solver.max_hilbert_dim = s["max_hilbert_dim"].get<int>();
        if (s.contains("n_max")) spec.solver.n_max = s["n_max"].get<int>();
        if (s.contains("r0")) spec.solver.r0 = s["r0"].get<double>();
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

namespace {

void fill_from_triplet_singlet(ResultRecord& r, const Matrix& rho_q, double conc) {
    const TripletSingletDecomposition d = triplet_singlet_transform(rho_q);
    r.p00 = d.p00;
    r.pT = d.pT;
    r.pS = d.pS;
    r.p11 = d.p11;
    r.concurrence = conc;
}

double stochastic_auto_t_end(const ModelParams& p) {
    const double g = std::max(p.gamma1, p.gamma2);
    return 5.0 / std::max(p.kappa, 1e-12) + 10.0 / std::max(g, 1e-12);
}

}  // namespace

ResultRecord run_steady(const SweepSpec& spec) {
    const ModelParams& p = spec.params;
    ResultRecord rec;
    rec.params = p;
    rec.route = spec.route;
    rec.seed = spec.seed;

    switch (spec.route) {
        case Route::Exact: {
            SteadyStateOptions opts;
            opts.tail_tol = spec.solver.tail_tol;
            opts.max_hilbert_dim = spec.solver.max_hilbert_dim;
            SteadyStateResult res;
            if (p.has_positions()) {
                ModelParams q = p;
                if (q.fock_cutoff == 0)
                    q.fock_cutoff = std::max(q.default_fock_cutoff(),
                                             fock_cutoff_for_tail(q.n_th, opts.tail_tol));
                if (4 * q.fock_cutoff > opts.max_hilbert_dim)
                    throw std::runtime_error("exact bidirectional solve exceeds max Hilbert dim");
                res = steady_state(build_bidirectional_liouvillian(q));
            } else {
                res = steady_state_full(p, opts);
            }
            rec.residual = res.residual;
            rec.n_max = res.fock_cutoff;
            fill_from_triplet_singlet(rec, res.rho_qubits, res.concurrence);
            break;
        }
        case Route::Markov: {
            SteadyStateResult res = steady_state(build_markov_liouvillian(p));
            rec.residual = res.residual;
            fill_from_triplet_singlet(rec, res.rho_qubits, res.concurrence);
            break;
        }
        case Route::Bourret: {
            const AnalyticPrediction a = bourret_steady_full(p);
            rec.p00 = a.p00;
            rec.pT = a.pT;
            rec.pS = a.pS;
            rec.p11 = a.p11;
            rec.concurrence = bourret_concurrence(p);
            break;
        }
        case Route::Quasistatic: {
            const double g = p.gamma();
            const AnalyticPrediction a = quasistatic_steady(p.photon_flux() / g);
            rec.p00 = a.p00;
            rec.pT = a.pT;
            rec.pS = a.pS;
            rec.p11 = a.p11;
            rec.concurrence = a.concurrence;
            break;
        }
        case Route::Cfrac: {
            McfOptions opts;
            opts.n_max = spec.solver.n_max;
            const CfracSolution sol = mcf_steady(p, opts);
            rec.p00 = sol.p00;
            rec.pT = sol.pT;
            rec.pS = sol.pS;
            rec.p11 = sol.p11;
            rec.concurrence = sol.concurrence;
            rec.n_max = sol.n_max;
            break;
        }
        case Route::Bidirectional: {
            McfOptions opts;
            opts.n_max = spec.solver.n_max;
            const CfracSolution sol = bidirectional_phase_space_steady(p, opts);
            rec.p00 = sol.p00;
            rec.pT = sol.pT;
            rec.pS = sol.pS;
            rec.p11 = sol.p11;
            rec.concurrence = sol.concurrence;
            rec.n_max = sol.n_max;
            break;
        }
        case Route::PhaseDiffusion: {
            const Matrix rho = phase_diffusion_steady(p, spec.solver.r0);
            fill_from_triplet_singlet(rec, rho, concurrence(rho));
            break;
        }
        case Route::Stochastic: {
            EnsembleOptions opts;
            opts.n_traj = spec.solver.n_traj;
            opts.dt = spec.solver.dt;
            opts.master_seed = spec.seed;
            opts.workers = worker_count_from_env(spec.workers);
            opts.steady_window_fraction = spec.solver.steady_window;
            const double t_end =
                spec.solver.t_end > 0.0 ? spec.solver.t_end : stochastic_auto_t_end(p);
            const TrajectoryEnsemble ens = ensemble_average(p, t_end, opts);
            const Matrix rho = 0.5 * (ens.steady_rho + ens.steady_rho.adjoint());
            fill_from_triplet_singlet(rec, rho, concurrence(rho));
            for (double s : ens.steady_pop_se) rec.mc_error = std::max(rec.mc_error, s);
            break;
        }
    }
    return rec;
}

SweepResult run_sweep(const SweepSpec& spec) {
    std::vector<std::vector<double>> axis_values;
    axis_values.reserve(spec.axes.size());
    std::size_t total = 1;
    for (const AxisSpec& ax : spec.axes) {
        axis_values.push_back(ax.values());
        total *= axis_values.back().size();
    }

    SweepResult result;
    result.records.resize(total);

    std::atomic<std::size_t> next{0};
    std::atomic<int> failed{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t flat = next.fetch_add(1);
            if (flat >= total) return;

            SweepSpec point = spec;
            point.seed = derive_seed(spec.seed, flat);
            // row-major decode: first axis varies slowest
            std::size_t rem = flat;
            std::optional<double> phi_value;
            for (std::size_t a_rev = 0; a_rev < spec.axes.size(); ++a_rev) {
                const std::size_t a = spec.axes.size() - 1 - a_rev;
                const auto& vals = axis_values[a];
                const double v = vals[rem % vals.size()];
                rem /= vals.size();
                if (spec.axes[a].param == "phi")
                    phi_value = v;
                else
                    set_param(point.params, spec.axes[a].param, v);
            }
            if (phi_value) {
                if (!(point.params.kappa > 0.0))
                    throw std::invalid_argument("phi axis requires kappa > 0");
                point.params.n_th = 2.0 * (*phi_value) / point.params.kappa;
            }

            ResultRecord rec;
            try {
                // Grid-level threads for cheap routes; the stochastic route
                // parallelizes trajectories inside a single point instead.
                SweepSpec seq = point;
                seq.workers = (spec.route == Route::Stochastic) ? spec.workers : 1;
                rec = run_steady(seq);
            } catch (const std::exception& e) {
                rec.params = point.params;
                rec.route = point.route;
                rec.seed = point.seed;
                rec.error = e.what();
                failed.fetch_add(1);
            }
            result.records[flat] = std::move(rec);
        }
    };

    int n_workers = worker_count_from_env(spec.workers);
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(total)));
    if (spec.route == Route::Stochastic) n_workers = 1;  // trajectories parallelize internally
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    result.failed = failed.load();
    return result;
}

std::string csv_header() {
    return "route,gamma1[angfreq],gamma2[angfreq],kappa[angfreq],n_th[-],delta1[angfreq],"
           "delta2[angfreq],gamma_phi[angfreq],p_loss[-],fock_cutoff[-],k0z1[rad],k0z2[rad],"
           "phi[angfreq],seed[-],rho_00[-],rho_T[-],rho_S[-],rho_11[-],concurrence[-],"
           "residual[-],n_max[-],mc_error[-],engine_version,error";
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << csv_header() << "\n";
    for (const ResultRecord& r : records) {
        const ModelParams& p = r.params;
        os << route_name(r.route) << ',' << fmt_double(p.gamma1) << ',' << fmt_double(p.gamma2)
           << ',' << fmt_double(p.kappa) << ',' << fmt_double(p.n_th) << ','
           << fmt_double(p.delta1) << ',' << fmt_double(p.delta2) << ','
           << fmt_double(p.gamma_phi) << ',' << fmt_double(p.p_loss) << ',' << p.fock_cutoff
           << ',' << (p.k0z1 ? fmt_double(*p.k0z1) : "") << ','
           << (p.k0z2 ? fmt_double(*p.k0z2) : "") << ',' << fmt_double(p.photon_flux()) << ','
           << r.seed << ',' << fmt_double(r.p00) << ',' << fmt_double(r.pT) << ','
           << fmt_double(r.pS) << ',' << fmt_double(r.p11) << ',' << fmt_double(r.concurrence)
           << ',' << fmt_double(r.residual) << ',' << r.n_max << ',' << fmt_double(r.mc_error)
           << ',' << kEngineVersion << ',' << r.error << "\n";
    }
}

void write_json(std::ostream& os, const std::vector<ResultRecord>& records) {
    json arr = json::array();
    for (const ResultRecord& r : records) {
        json j;
        j["route"] = route_name(r.route);
        json pj;
        pj["gamma1"] = r.params.gamma1;
        pj["gamma2"] = r.params.gamma2;
        pj["kappa"] = r.params.kappa;
        pj["n_th"] = r.params.n_th;
        pj["delta1"] = r.params.delta1;
        pj["delta2"] = r.params.delta2;
        pj["gamma_phi"] = r.params.gamma_phi;
        pj["p_loss"] = r.params.p_loss;
        pj["fock_cutoff"] = r.params.fock_cutoff;
        if (r.params.k0z1) pj["k0z1"] = *r.params.k0z1;
        if (r.params.k0z2) pj["k0z2"] = *r.params.k0z2;
        j["params"] = pj;
        j["phi"] = r.params.photon_flux();
        j["seed"] = r.seed;
        j["populations"] = {{"rho_00", r.p00}, {"rho_T", r.pT}, {"rho_S", r.pS}, {"rho_11", r.p11}};
        j["concurrence"] = r.concurrence;
        j["diagnostics"] = {{"residual", r.residual}, {"n_max", r.n_max}, {"mc_error", r.mc_error}};
        j["engine_version"] = kEngineVersion;
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << "\n";
}

int worker_count_from_env(int requested) {
    if (const char* env = std::getenv("THERMALINK_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (requested > 0) return requested;
    const int hc = static_cast<int>(std::thread::hardware_concurrency());
    return hc > 0 ? hc : 1;
}

void write_timeseries_csv(std::ostream& os, const std::vector<double>& t,
                          const std::vector<Matrix>& states,
                          const std::vector<std::array<double, 6>>* se) {
    os << "t[1/angfreq],rho_00[-],rho_T[-],rho_S[-],rho_11[-],p1_qubit1[-],p1_qubit2[-],"
          "concurrence[-],se_00[-],se_T[-],se_S[-],se_11[-]\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        Matrix rho = 0.5 * (states[k] + states[k].adjoint());
        rho /= rho.trace().real();
        const TripletSingletDecomposition d = triplet_singlet_transform(rho);
        const double p1q1 = (rho(2, 2) + rho(3, 3)).real();
        const double p1q2 = (rho(1, 1) + rho(3, 3)).real();
        double conc = 0.0;
        try {
            conc = concurrence(rho);
        } catch (const std::exception&) {
            conc = std::numeric_limits<double>::quiet_NaN();
        }
        os << fmt_double(t[k]) << ',' << fmt_double(d.p00) << ',' << fmt_double(d.pT) << ','
           << fmt_double(d.pS) << ',' << fmt_double(d.p11) << ',' << fmt_double(p1q1) << ','
           << fmt_double(p1q2) << ',' << fmt_double(conc);
        for (int q = 0; q < 4; ++q) os << ',' << fmt_double(se ? (*se)[k][q] : 0.0);
        os << "\n";
    }
}

namespace {

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn,
                std::vector<std::string>& written) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    fn(out);
    written.push_back(path);
}

SweepSpec base_spec(Route route, std::uint64_t seed, int workers) {
    SweepSpec s;
    s.route = route;
    s.seed = seed;
    s.workers = workers;
    s.params.gamma1 = s.params.gamma2 = 1.0;
    return s;
}

void sweep_to_file(const SweepSpec& spec, const std::string& path,
                   std::vector<std::string>& written) {
    const SweepResult res = run_sweep(spec);
    write_file(path, [&](std::ostream& os) { write_csv(os, res.records); }, written);
}

std::vector<double> time_grid(double t_end, int points) {
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i) t[i] = t_end * i / (points - 1);
    return t;
}

// Ensemble time trace written as a time-series CSV.
void stochastic_trace_to_file(const ModelParams& p, double t_end, int n_traj,
                              std::uint64_t seed, int workers, const std::string& path,
                              std::vector<std::string>& written) {
    EnsembleOptions opts;
    opts.n_traj = n_traj;
    opts.master_seed = seed;
    opts.workers = worker_count_from_env(workers);
    opts.output_points = 200;
    const TrajectoryEnsemble ens = ensemble_average(p, t_end, opts);
    write_file(path,
               [&](std::ostream& os) { write_timeseries_csv(os, ens.t, ens.rho, &ens.pop_se); },
               written);
}

}  // namespace

std::vector<std::string> run_figure(const std::string& name, const std::string& out_dir,
                                    std::uint64_t seed, int workers) {
    std::vector<std::string> written;
    auto path = [&](const std::string& file) { return out_dir + "/" + file; };

    if (name == "fig2c") {
        SweepSpec s = base_spec(Route::Exact, seed, workers);
        s.solver.tail_tol = 1e-6;
        s.axes = {{"n_th", "linear", 0.0, 10.0, 6}, {"kappa", "log", 1e-3, 1.0, 13}};
        sweep_to_file(s, path("fig2c_exact.csv"), written);
    } else if (name == "fig2d") {
        SweepSpec s = base_spec(Route::Exact, seed, workers);
        s.params.n_th = 2.0;
        s.axes = {{"kappa", "log", 1e-3, 0.3, 20}};
        sweep_to_file(s, path("fig2d_exact.csv"), written);
        s.route = Route::Bourret;
        s.axes = {{"kappa", "log", 1e-3, 0.3, 60}};
        sweep_to_file(s, path("fig2d_bourret.csv"), written);
    } else if (name == "fig3a") {
        for (double kappa : {1e-2, 1e-3, 1e-4}) {
            SweepSpec s = base_spec(Route::Cfrac, seed, workers);
            s.params.kappa = kappa;
            s.axes = {{"n_th", "log", 1.0, 1e6, 25}};
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig3a_cfrac_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
            s.route = Route::Quasistatic;
            std::snprintf(buf, sizeof(buf), "fig3a_quasistatic_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
        }
        // closed-form curve of the mode-expansion reduction
        write_file(path("fig3a_closed_form.csv"), [&](std::ostream& os) {
            os << "kappa[angfreq],n_th[-],concurrence[-]\n";
            for (double kappa : {1e-2, 1e-3, 1e-4}) {
                ModelParams p;
                p.kappa = kappa;
                const AxisSpec ax{"n_th", "log", 1.0, 1e6, 49};
                for (double n : ax.values()) {
                    p.n_th = n;
                    os << fmt_double(kappa) << ',' << fmt_double(n) << ','
                       << fmt_double(closed_form_concurrence(p)) << "\n";
                }
            }
        }, written);
    } else if (name == "fig3b") {
        // single thermally driven qubit at fixed flux, varying bandwidth
        const double phi = 10.0;
        for (double kappa : {1e-1, 1e-2, 1e-3}) {
            ModelParams p;
            p.gamma1 = 1.0;
            p.gamma2 = 0.0;
            p.kappa = kappa;
            p.n_th = 2.0 * phi / kappa;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig3b_thermal_kappa%.0e.csv", kappa);
            stochastic_trace_to_file(p, 5.0, 4000, seed, workers, path(buf), written);
        }
        // coherent-drive reference with Rabi frequency sqrt(gamma phi)
        write_file(path("fig3b_coherent.csv"), [&](std::ostream& os) {
            ModelParams p;
            p.gamma1 = 1.0;
            p.gamma2 = 0.0;
            p.kappa = 1e-3;
            p.n_th = 2.0 * phi / p.kappa;
            OUPath constant;
            constant.dt = 2e-3;
            const int n = 2501;
            constant.t.resize(n);
            constant.alpha.assign(n, Complex(std::sqrt(p.n_th / 2.0), 0.0));
            for (int i = 0; i < n; ++i) constant.t[i] = i * constant.dt;
            Matrix mu0 = Matrix::Zero(4, 4);
            mu0(0, 0) = 1.0;
            const std::vector<Matrix> mus = propagate_conditional(constant, p, mu0);
            write_timeseries_csv(os, constant.t, mus, nullptr);
        }, written);
    } else if (name == "fig3c") {
        for (double kappa : {1e-2, 1e-3}) {
            SweepSpec s = base_spec(Route::Bourret, seed, workers);
            s.params.kappa = kappa;
            s.axes = {{"n_th", "log", 1.0, 1e6, 25}};
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig3c_bourret_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
            s.route = Route::PhaseDiffusion;
            std::snprintf(buf, sizeof(buf), "fig3c_phase_diffusion_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
        }
    } else if (name == "fig4a") {
        for (double n_th : {10.0, 100.0, 1000.0, 1220.0}) {
            ModelParams p;
            p.kappa = 1e-3;
            p.n_th = n_th;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig4a_nth%g.csv", n_th);
            stochastic_trace_to_file(p, 20.0, 4000, seed, workers, path(buf), written);
        }
    } else if (name == "fig4b") {
        // gamma/(2pi) = 10 MHz: T_phi = {inf, 10, 1, 0.1} us in these units
        for (double gamma_phi : {0.0, 1.59e-3, 1.59e-2, 1.59e-1}) {
            ModelParams p;
            p.kappa = 1e-3;
            p.n_th = 1220.0;
            p.gamma_phi = gamma_phi;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig4b_gphi%g.csv", gamma_phi);
            stochastic_trace_to_file(p, 20.0, 4000, seed, workers, path(buf), written);
        }
    } else if (name == "fig4c") {
        write_file(path("fig4c_cfrac.csv"), [&](std::ostream& os) {
            std::vector<ResultRecord> recs;
            const AxisSpec g2_ax{"gamma2", "linear", 0.5, 1.5, 11};
            const AxisSpec ds_ax{"delta_s", "linear", -1.0, 1.0, 11};
            for (double g2 : g2_ax.values()) {
                for (double ds : ds_ax.values()) {
                    SweepSpec s = base_spec(Route::Cfrac, seed, workers);
                    s.params.kappa = 1e-3;
                    s.params.n_th = 1220.0;
                    s.params.gamma2 = g2;
                    s.params.delta1 = s.params.delta2 = ds;
                    recs.push_back(run_steady(s));
                }
            }
            write_csv(os, recs);
        }, written);
    } else if (name == "fig4d") {
        for (double kappa : {1e-3, 1e-2}) {
            SweepSpec s = base_spec(Route::Cfrac, seed, workers);
            s.params.kappa = kappa;
            s.params.n_th = 1220.0;
            s.axes = {{"p_loss", "linear", 0.0, 0.5, 21}};
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig4d_cfrac_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
        }
    } else if (name == "fig7a") {
        for (double kappa : {1e-2, 1e-3}) {
            SweepSpec s = base_spec(Route::Bidirectional, seed, workers);
            s.params.kappa = kappa;
            s.params.delta1 = 0.5;
            s.params.delta2 = -0.5;
            s.params.k0z1 = 2.0 * M_PI;
            s.params.k0z2 = 4.0 * M_PI;
            s.axes = {{"n_th", "log", 1.0, 1e4, 17}};
            char buf[64];
            std::snprintf(buf, sizeof(buf), "fig7a_phase_space_kappa%.0e.csv", kappa);
            sweep_to_file(s, path(buf), written);
        }
        {
            SweepSpec s = base_spec(Route::Exact, seed, workers);
            s.params.kappa = 1e-2;
            s.params.delta1 = 0.5;
            s.params.delta2 = -0.5;
            s.params.k0z1 = 2.0 * M_PI;
            s.params.k0z2 = 4.0 * M_PI;
            s.solver.tail_tol = 1e-6;
            s.axes = {{"n_th", "linear", 2.0, 50.0, 5}};
            sweep_to_file(s, path("fig7a_exact_kappa1e-02.csv"), written);
        }
    } else if (name == "fig7b") {
        SweepSpec s = base_spec(Route::Bidirectional, seed, workers);
        s.params.kappa = 1e-2;
        s.params.n_th = 2000.0;
        s.params.delta1 = 0.5;
        s.params.delta2 = -0.5;
        s.params.k0z1 = 0.0;
        s.params.k0z2 = 0.0;
        s.axes = {{"k0z1", "linear", 0.0, 2.0 * M_PI, 21},
                  {"k0z2", "linear", 0.0, 2.0 * M_PI, 21}};
        sweep_to_file(s, path("fig7b_phase_space.csv"), written);
    } else {
        throw std::invalid_argument("unknown figure: " + name);
    }
    return written;
}

bool run_validation(std::ostream& os, std::uint64_t seed, int workers) {
    bool all_ok = true;
    auto check = [&](const std::string& name, double value, double bound) {
        const bool ok = value < bound;
        all_ok &= ok;
        os << (ok ? "PASS " : "FAIL ") << name << ": " << value << " (< " << bound << ")\n";
    };

    {  // broadband limit: collective thermal qubits relax to the product form
        SweepSpec s = base_spec(Route::Markov, seed, workers);
        s.params.n_th = 1.0;
        const ResultRecord r = run_steady(s);
        const AnalyticPrediction a = markov_steady(1.0);
        const double dev = std::max({std::abs(r.p00 - a.p00), std::abs(r.pT - a.pT),
                                     std::abs(r.pS - a.pS), std::abs(r.p11 - a.p11)});
        check("markov-route vs closed form", dev, 1e-10);
    }
    {  // exact Fock solve against the mode-expansion route
        SweepSpec s = base_spec(Route::Exact, seed, workers);
        s.params.kappa = 0.01;
        s.params.n_th = 2.0;
        const ResultRecord exact = run_steady(s);
        s.route = Route::Cfrac;
        const ResultRecord mcf = run_steady(s);
        const double dev = std::max({std::abs(exact.p00 - mcf.p00), std::abs(exact.pT - mcf.pT),
                                     std::abs(exact.pS - mcf.pS), std::abs(exact.p11 - mcf.p11),
                                     std::abs(exact.concurrence - mcf.concurrence)});
        check("exact vs continued fraction (n_th=2, kappa=0.01)", dev, 1e-6);
    }
    {  // quasistatic recovery of the closed form at tiny bandwidth
        ModelParams p;
        p.kappa = 1e-5;
        p.n_th = 100.0;
        const double c_closed = closed_form_concurrence(p);
        const double c_qs = quasistatic_steady(p.photon_flux()).concurrence;
        check("closed form vs quasistatic (kappa=1e-5)", std::abs(c_closed - c_qs) / c_qs, 0.01);
    }
    {  // decorrelation approximation against the exact solver; its genuine
       // error peaks around kappa/gamma ~ 0.1 at the 0.08 level
        SweepSpec s = base_spec(Route::Exact, seed, workers);
        s.params.kappa = 0.1;
        s.params.n_th = 2.0;
        const ResultRecord exact = run_steady(s);
        s.route = Route::Bourret;
        const ResultRecord bour = run_steady(s);
        check("bourret vs exact concurrence (n_th=2, kappa=0.1)",
              std::abs(exact.concurrence - bour.concurrence), 0.1);
    }
    {  // scalar continued fraction against its closed-form limit
        ModelParams p;
        p.kappa = 1e-3;
        p.n_th = 100.0;
        const ThreeLevelResult tl = three_level_cf_steady(p);
        const ClosedFormPopulations cf = closed_form_populations(p);
        const double dev =
            std::max(std::abs(tl.pS - cf.pS_full), std::abs(tl.pT - cf.pT_full));
        check("scalar CF vs closed-form populations (kappa=1e-3)", dev, 1e-6);
    }
    return all_ok;
}

}  // namespace thermalink
