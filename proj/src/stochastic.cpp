#include "thermalink/stochastic.hpp"

#include "thermalink/solvers.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace thermalink {

namespace {

// splitmix64: the increment/mix pair used for both seed derivation and the
// per-trajectory sample streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}

    double uniform() {  // (0, 1)
        return (static_cast<double>(splitmix64_next(state) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Independent standard normal pair via Box-Muller.
    void normal_pair(double& z1, double& z2) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z1 = r * std::cos(2.0 * M_PI * u2);
        z2 = r * std::sin(2.0 * M_PI * u2);
    }
};

using Matrix4 = Eigen::Matrix4cd;

// Fixed-size workspace for the conditional qubit propagation.
struct QubitPropagator {
    Matrix4 h0;                           // drift Hamiltonian (no drive)
    Matrix4 cp;                           // sqrt(kappa) (sqrt(g1) s1+ + sqrt(g2) s2+)
    std::vector<std::pair<Matrix4, Matrix4>> jumps;  // (L, L^+ L) with rates folded in
    double rate_scale = 0.0;              // drive-independent rate bound

    explicit QubitPropagator(const ModelParams& p) {
        h0 = qubit_hamiltonian(p);
        cp = std::sqrt(p.kappa) * (std::sqrt(p.gamma1) * qubit_sigma_plus(1) +
                                   std::sqrt(p.gamma2) * qubit_sigma_plus(2));
        auto add_jump = [&](double rate, const Matrix& l) {
            if (rate <= 0.0) return;
            const Matrix4 ls = std::sqrt(rate) * Matrix4(l);
            jumps.emplace_back(ls, Matrix4(ls.adjoint() * ls));
        };
        const double g1_kept = p.gamma1 * (1.0 - p.p_loss);
        add_jump(1.0, std::sqrt(g1_kept) * qubit_sigma_minus(1) +
                          std::sqrt(p.gamma2) * qubit_sigma_minus(2));
        add_jump(p.gamma1 * p.p_loss, qubit_sigma_minus(1));
        add_jump(0.5 * p.gamma_phi, qubit_sigma_z(1));
        add_jump(0.5 * p.gamma_phi, qubit_sigma_z(2));
        rate_scale = p.gamma1 + p.gamma2 + 2.0 * p.gamma_phi +
                     std::abs(p.delta1) + std::abs(p.delta2);
    }

    Matrix4 deriv(const Matrix4& h, const Matrix4& mu) const {
        Matrix4 d = Complex(0, -1) * (h * mu - mu * h);
        for (const auto& [l, ldl] : jumps)
            d += l * mu * l.adjoint() - 0.5 * (ldl * mu + mu * ldl);
        return d;
    }

    // RK4 over one grid step with alpha frozen; substeps keep rate * h small.
    void step(Matrix4& mu, Complex alpha, double dt) const {
        const Matrix4 h =
            h0 + Complex(0, -1) * (alpha * cp - std::conj(alpha) * Matrix4(cp.adjoint()));
        const double rate = rate_scale + 2.0 * std::abs(alpha) * cp.cwiseAbs().maxCoeff();
        const int n_sub = std::max(1, static_cast<int>(std::ceil(dt * rate / 0.05)));
        const double h_sub = dt / n_sub;
        for (int s = 0; s < n_sub; ++s) {
            const Matrix4 k1 = deriv(h, mu);
            const Matrix4 k2 = deriv(h, Matrix4(mu + 0.5 * h_sub * k1));
            const Matrix4 k3 = deriv(h, Matrix4(mu + 0.5 * h_sub * k2));
            const Matrix4 k4 = deriv(h, Matrix4(mu + h_sub * k3));
            mu += (h_sub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
};

double default_grid_dt(const ModelParams& p) {
    // Conservative amplitude scale: the Rayleigh tail beyond 5 sqrt(n_th/2)
    // carries probability e^-25 per sample.
    const double g = std::max(p.gamma1, p.gamma2);
    const double alpha_scale = 5.0 * std::sqrt(std::max(p.n_th, 1.0) / 2.0);
    const double drive = std::sqrt(p.kappa * g) * alpha_scale;
    double dt = std::min(0.02 / std::max(g, 1e-300), 0.1 / std::max(p.kappa, 1e-300));
    dt = std::min(dt, 0.04 / std::max(drive, 1e-300));
    return dt;
}

double step_bound(const ModelParams& p, double alpha_max) {
    const double g = std::max(p.gamma1, p.gamma2);
    return 0.05 / std::max(g, std::sqrt(p.kappa * g) * alpha_max);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ (index * 0xd2b74407b1ce6e93ULL + 0x8d265312e026fa1dULL);
    return splitmix64_next(s);
}

double OUPath::max_abs_alpha() const {
    double m = 0.0;
    for (const Complex& a : alpha) m = std::max(m, std::abs(a));
    return m;
}

OUPath sample_ou_path(const ModelParams& params, double t_end, double dt,
                      std::uint64_t master_seed, std::uint64_t traj_index) {
    if (!(params.kappa > 0.0)) throw std::invalid_argument("sample_ou_path: kappa must be > 0");
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("sample_ou_path: bad grid");

    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    OUPath path;
    path.master_seed = master_seed;
    path.index = traj_index;
    path.dt = dt;
    path.t.resize(n_steps + 1);
    path.alpha.resize(n_steps + 1);

    Rng rng(derive_seed(master_seed, traj_index));
    // Stationary start: each quadrature N(0, n_th/4).
    const double q_sigma = std::sqrt(params.n_th / 4.0);
    double z1, z2;
    rng.normal_pair(z1, z2);
    Complex a{q_sigma * z1, q_sigma * z2};

    // Exact transition kernel: alpha -> alpha e^{-kappa dt} + xi,
    // <|xi|^2> = (n_th/2)(1 - e^{-2 kappa dt}).
    const double decay = std::exp(-params.kappa * dt);
    const double xi_sigma = std::sqrt(params.n_th / 4.0 * (1.0 - decay * decay));

    path.t[0] = 0.0;
    path.alpha[0] = a;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        rng.normal_pair(z1, z2);
        a = a * decay + Complex{xi_sigma * z1, xi_sigma * z2};
        path.t[k] = static_cast<double>(k) * dt;
        path.alpha[k] = a;
    }
    return path;
}

std::vector<Matrix> propagate_conditional(const OUPath& path, const ModelParams& params,
                                          const Matrix& mu0) {
    params.validate();
    check_density_matrix(mu0, 1e-8);
    if (path.alpha.empty()) throw std::invalid_argument("propagate_conditional: empty path");
    if (path.dt > step_bound(params, path.max_abs_alpha()))
        throw StepTooCoarseError("propagate_conditional: grid step " + std::to_string(path.dt) +
                                 " exceeds 0.05 / max(gamma, sqrt(kappa gamma) |alpha|_max)");

    const QubitPropagator prop(params);
    Matrix4 mu = Matrix4(mu0);
    std::vector<Matrix> out;
    out.reserve(path.alpha.size());
    out.push_back(mu0);
    for (std::size_t k = 0; k + 1 < path.alpha.size(); ++k) {
        prop.step(mu, path.alpha[k], path.dt);
        out.push_back(Matrix(mu));
    }
    return out;
}

namespace {

// tracked populations of a two-qubit operator: TS-basis diagonal plus the
// per-qubit excited populations
std::array<double, 6> tracked_populations(const Eigen::Matrix4cd& mu) {
    const double p01 = mu(1, 1).real();
    const double p10 = mu(2, 2).real();
    const double cross = mu(1, 2).real();  // Re <01|mu|10>
    std::array<double, 6> p{};
    p[kPop00] = mu(0, 0).real();
    p[kPopT] = 0.5 * (p01 + p10) + cross;
    p[kPopS] = 0.5 * (p01 + p10) - cross;
    p[kPop11] = mu(3, 3).real();
    p[kPopQubit1] = p10 + p[kPop11];
    p[kPopQubit2] = p01 + p[kPop11];
    return p;
}

}  // namespace

std::vector<double> TrajectoryEnsemble::population(int which) const {
    std::vector<double> p(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k)
        p[k] = tracked_populations(Eigen::Matrix4cd(rho[k]))[which];
    return p;
}

std::vector<double> TrajectoryEnsemble::population_se(int which) const {
    std::vector<double> p(pop_se.size());
    for (std::size_t k = 0; k < pop_se.size(); ++k) p[k] = pop_se[k][which];
    return p;
}

TrajectoryEnsemble ensemble_average(const ModelParams& params, double t_end,
                                    const EnsembleOptions& opts) {
    params.validate();
    if (opts.n_traj < 100) throw std::invalid_argument("ensemble_average: n_traj must be >= 100");
    const double dt = opts.dt > 0.0 ? opts.dt : default_grid_dt(params);
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_end / dt));

    // Output grid: subsampled step indices, always including 0 and n_steps.
    const int n_out = std::min<std::size_t>(std::max(2, opts.output_points), n_steps + 1);
    std::vector<std::size_t> out_idx(n_out);
    for (int i = 0; i < n_out; ++i) out_idx[i] = (n_steps * i) / (n_out - 1);
    std::vector<std::size_t> idx_of_step(n_steps + 1, SIZE_MAX);
    for (int i = 0; i < n_out; ++i) idx_of_step[out_idx[i]] = i;

    const std::size_t window_start =
        opts.steady_window_fraction > 0.0
            ? static_cast<std::size_t>(std::floor((1.0 - opts.steady_window_fraction) * n_steps))
            : n_steps + 1;

    constexpr int kChunk = 32;
    const int n_chunks = (opts.n_traj + kChunk - 1) / kChunk;

    using Matrix4 = Eigen::Matrix4cd;
    struct ChunkAccum {
        std::vector<Matrix4> sum_rho;  // per output index
        std::vector<std::array<double, 6>> sum_p, sum_p2;
        Matrix4 win_rho = Matrix4::Zero();
        std::array<double, 6> win_p{}, win_p2{};
    };
    std::vector<ChunkAccum> chunks(n_chunks);

    const QubitPropagator prop(params);
    const double bound = step_bound(params, 0.0);  // refined per path below
    (void)bound;

    std::atomic<int> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            const int c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkAccum acc;
            acc.sum_rho.assign(n_out, Matrix4::Zero());
            acc.sum_p.assign(n_out, {});
            acc.sum_p2.assign(n_out, {});
            const int t_lo = c * kChunk;
            const int t_hi = std::min<int>(opts.n_traj, t_lo + kChunk);
            for (int traj = t_lo; traj < t_hi; ++traj) {
                Rng rng(derive_seed(opts.master_seed, static_cast<std::uint64_t>(traj)));
                const double q_sigma = std::sqrt(params.n_th / 4.0);
                const double decay = std::exp(-params.kappa * dt);
                const double xi_sigma = std::sqrt(params.n_th / 4.0 * (1.0 - decay * decay));
                double z1, z2;
                rng.normal_pair(z1, z2);
                Complex alpha{q_sigma * z1, q_sigma * z2};

                Matrix4 mu = Matrix4::Zero();
                mu(0, 0) = 1.0;  // |00><00|

                Matrix4 win_sum = Matrix4::Zero();
                std::size_t win_count = 0;

                auto record = [&](std::size_t step) {
                    const std::size_t oi = idx_of_step[step];
                    if (oi != SIZE_MAX) {
                        acc.sum_rho[oi] += mu;
                        const auto p = tracked_populations(mu);
                        for (int q = 0; q < 6; ++q) {
                            acc.sum_p[oi][q] += p[q];
                            acc.sum_p2[oi][q] += p[q] * p[q];
                        }
                    }
                    if (step >= window_start) {
                        win_sum += mu;
                        ++win_count;
                    }
                };

                record(0);
                for (std::size_t k = 1; k <= n_steps; ++k) {
                    if (dt > step_bound(params, std::abs(alpha)))
                        throw StepTooCoarseError("ensemble_average: amplitude spike beyond grid");
                    prop.step(mu, alpha, dt);
                    rng.normal_pair(z1, z2);
                    alpha = alpha * decay + Complex{xi_sigma * z1, xi_sigma * z2};
                    record(k);
                }
                if (win_count > 0) {
                    const Matrix4 wm = win_sum / static_cast<double>(win_count);
                    acc.win_rho += wm;
                    const auto p = tracked_populations(wm);
                    for (int q = 0; q < 6; ++q) {
                        acc.win_p[q] += p[q];
                        acc.win_p2[q] += p[q] * p[q];
                    }
                }
            }
            chunks[c] = std::move(acc);
        }
    };

    int n_workers = opts.workers > 0 ? opts.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min(n_workers, n_chunks));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Deterministic reduction in chunk order.
    TrajectoryEnsemble ens;
    ens.n_traj = opts.n_traj;
    ens.t.resize(n_out);
    for (int i = 0; i < n_out; ++i) ens.t[i] = static_cast<double>(out_idx[i]) * dt;
    ens.rho.assign(n_out, Matrix::Zero(4, 4));
    ens.pop_se.assign(n_out, {});

    const double n = static_cast<double>(opts.n_traj);
    std::vector<Matrix4> sum_rho(n_out, Matrix4::Zero());
    std::vector<std::array<double, 6>> sum_p(n_out), sum_p2(n_out);
    Matrix4 wsum = Matrix4::Zero();
    std::array<double, 6> wp{}, wp2{};
    for (const ChunkAccum& acc : chunks) {
        for (int i = 0; i < n_out; ++i) {
            sum_rho[i] += acc.sum_rho[i];
            for (int q = 0; q < 6; ++q) {
                sum_p[i][q] += acc.sum_p[i][q];
                sum_p2[i][q] += acc.sum_p2[i][q];
            }
        }
        wsum += acc.win_rho;
        for (int q = 0; q < 6; ++q) {
            wp[q] += acc.win_p[q];
            wp2[q] += acc.win_p2[q];
        }
    }
    auto se = [&](double s, double s2) {
        const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
        return std::sqrt(var / n);
    };
    for (int i = 0; i < n_out; ++i) {
        ens.rho[i] = Matrix(sum_rho[i] / n);
        for (int q = 0; q < 6; ++q) ens.pop_se[i][q] = se(sum_p[i][q], sum_p2[i][q]);
    }
    if (window_start <= n_steps) {
        ens.steady_rho = Matrix(wsum / n);
        for (int q = 0; q < 6; ++q) ens.steady_pop_se[q] = se(wp[q], wp2[q]);
    }
    return ens;
}

Matrix phase_diffusion_steady(const ModelParams& params, double r0) {
    params.validate();
    if (r0 == 0.0) r0 = std::sqrt(params.n_th / 2.0);
    if (!(r0 > 0.0)) throw std::invalid_argument("phase_diffusion_steady: radius must be > 0");
    const double dephasing = params.kappa * params.n_th / (8.0 * r0 * r0);
    Matrix gen = qubit_cascade_generator(params) +
                 r0 * (drive_plus_generator(params) + drive_minus_generator(params)) +
                 dephasing * dissipator(collective_sz());
    Superoperator l{4, to_sparse(gen)};
    return steady_state(l).rho;
}

}  // namespace thermalink
