#pragma once

#include "thermalink/linalg.hpp"
#include "thermalink/model.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermalink {

inline constexpr const char* kEngineVersion = "thermalink 1.0.0";

enum class Route {
    Exact,
    Stochastic,
    Bourret,
    Cfrac,
    Quasistatic,
    Markov,
    PhaseDiffusion,
    Bidirectional,
};

Route route_from_string(const std::string& name);
std::string route_name(Route route);

struct AxisSpec {
    std::string param;  // a ModelParams field name
    std::string scale = "linear";  // linear | log
    double min = 0.0;
    double max = 0.0;
    int points = 1;

    std::vector<double> values() const;
};

// Route-tunable knobs, all optional in the config.
struct SolverSpec {
    int n_traj = 10000;
    double t_end = 0.0;           // 0 = automatic (stochastic route)
    double dt = 0.0;              // 0 = automatic
    double steady_window = 0.5;   // trailing fraction averaged for the stationary estimate
    double tail_tol = 1e-8;       // exact-route cavity tail bound
    int max_hilbert_dim = 4096;
    int n_max = 0;                // cfrac truncation; 0 = automatic
    double r0 = 0.0;              // phase-diffusion radius; 0 = sqrt(n_th/2)
};

struct SweepSpec {
    Route route = Route::Exact;
    ModelParams params;
    std::vector<AxisSpec> axes;   // row-major grid order
    std::uint64_t seed = 1;
    int workers = 0;              // 0 = hardware concurrency (env override applies)
    std::string out_path;
    std::string format = "csv";   // csv | json
    SolverSpec solver;
};

// Strict parser: unknown keys anywhere in the document are errors.
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

struct ResultRecord {
    ModelParams params;
    Route route = Route::Exact;
    std::uint64_t seed = 0;
    double p00 = 0, pT = 0, pS = 0, p11 = 0;
    double concurrence = 0.0;
    double residual = 0.0;      // exact routes
    int n_max = 0;              // cfrac truncation / Fock cutoff
    double mc_error = 0.0;      // largest population standard error (stochastic)
    std::string error;          // nonempty when the point failed
};

ResultRecord run_steady(const SweepSpec& spec);

struct SweepResult {
    std::vector<ResultRecord> records;
    int failed = 0;
};

SweepResult run_sweep(const SweepSpec& spec);

std::string csv_header();
void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);
void write_json(std::ostream& os, const std::vector<ResultRecord>& records);

// Time-resolved two-qubit data in the triplet-singlet basis; `se` may be
// null for deterministic routes (population indices as in stochastic.hpp).
void write_timeseries_csv(std::ostream& os, const std::vector<double>& t,
                          const std::vector<Matrix>& states,
                          const std::vector<std::array<double, 6>>* se);

// Data bundles behind the published figures; returns the emitted file names.
std::vector<std::string> run_figure(const std::string& name, const std::string& out_dir,
                                    std::uint64_t seed, int workers);

// Cross-route consistency checks (quick variant of the acceptance oracle).
// Returns true when every check passes; prints one line per check.
bool run_validation(std::ostream& os, std::uint64_t seed, int workers);

int worker_count_from_env(int requested);

}  // namespace thermalink
