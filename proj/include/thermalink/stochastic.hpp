#pragma once

#include "thermalink/operators.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace thermalink {

// One realization of the filtered thermal field amplitude, sampled with the
// exact Ornstein-Uhlenbeck transition kernel on a uniform grid, starting
// from the stationary distribution <|alpha|^2> = n_th / 2.
struct OUPath {
    std::uint64_t master_seed = 0;
    std::uint64_t index = 0;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<Complex> alpha;

    double max_abs_alpha() const;
};

OUPath sample_ou_path(const ModelParams& params, double t_end, double dt,
                      std::uint64_t master_seed, std::uint64_t traj_index);

// Counter-based per-trajectory seeding (splitmix64 over master ^ index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

struct StepTooCoarseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Conditional two-qubit evolution along a frozen field path: integrates
// mu' = -i[H_alpha(t), mu] + (dissipative cascade terms) mu with alpha held
// piecewise constant per grid step. Returns mu at every grid point.
// Rejects grids with dt > 0.05 / max(gamma, sqrt(kappa gamma) |alpha|_max).
std::vector<Matrix> propagate_conditional(const OUPath& path, const ModelParams& params,
                                          const Matrix& mu0);

struct EnsembleOptions {
    int n_traj = 10000;
    double dt = 0.0;          // 0 = automatic from rates and amplitude scale
    std::uint64_t master_seed = 1;
    int workers = 0;          // 0 = hardware concurrency
    int output_points = 200;  // time samples kept in the averaged output
    double steady_window_fraction = 0.0;  // > 0: also average over the last fraction
};

// Tracked population indices: 0..3 are the triplet-singlet basis populations
// (p00, pT, pS, p11); 4 and 5 are the excited-state populations of qubit 1
// and qubit 2.
enum : int {
    kPop00 = 0,
    kPopT = 1,
    kPopS = 2,
    kPop11 = 3,
    kPopQubit1 = 4,
    kPopQubit2 = 5,
};

struct TrajectoryEnsemble {
    int n_traj = 0;
    std::vector<double> t;
    std::vector<Matrix> rho;  // ensemble-averaged state at each output time
    // standard errors of the tracked populations across trajectories
    std::vector<std::array<double, 6>> pop_se;

    // window-averaged stationary estimate (set when steady_window_fraction > 0)
    Matrix steady_rho;
    std::array<double, 6> steady_pop_se{};

    std::vector<double> population(int which) const;     // tracked population
    std::vector<double> population_se(int which) const;  // its standard error
};

// rho_q(t) = < mu(alpha(t), t) > over n_traj independent paths, starting from
// |00><00|. Deterministic for fixed master_seed regardless of worker count:
// trajectories are summed in fixed chunks ordered by index.
TrajectoryEnsemble ensemble_average(const ModelParams& params, double t_end,
                                    const EnsembleOptions& opts = {});

// Steady state of the fixed-amplitude drive with the collective phase
// diffusion term (kappa n_th / (8 r0^2)) D[S^z]; r0 = 0 selects the
// stationary mean sqrt(n_th / 2), for which the rate is exactly kappa / 4.
Matrix phase_diffusion_steady(const ModelParams& params, double r0 = 0.0);

}  // namespace thermalink
