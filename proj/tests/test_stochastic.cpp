#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "thermalink/solvers.hpp"
#include "thermalink/stochastic.hpp"

using namespace thermalink;

namespace {

Matrix ground_state() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0;
    return m;
}

Vector dark_state(Complex alpha0, const ModelParams& p) {
    const double g = p.gamma();
    Vector psi = std::sqrt(g) * ket00() +
                 2.0 * std::sqrt(2.0 * p.kappa) * alpha0 * singlet_ket();
    return psi / psi.norm();
}

}  // namespace

TEST_CASE("OU paths are reproducible and stationary") {
    ModelParams p;
    p.kappa = 0.2;
    p.n_th = 3.0;
    const OUPath a = sample_ou_path(p, 10.0, 0.05, 99, 7);
    const OUPath b = sample_ou_path(p, 10.0, 0.05, 99, 7);
    const OUPath c = sample_ou_path(p, 10.0, 0.05, 99, 8);
    REQUIRE(a.alpha.size() == b.alpha.size());
    for (std::size_t k = 0; k < a.alpha.size(); ++k) CHECK(a.alpha[k] == b.alpha[k]);
    CHECK(a.alpha[0] != c.alpha[0]);

    CHECK_THROWS_AS(sample_ou_path(ModelParams{}, 1.0, 0.0, 1, 0), std::invalid_argument);
    ModelParams zero_kappa;
    zero_kappa.kappa = 0.0;
    CHECK_THROWS_AS(sample_ou_path(zero_kappa, 1.0, 0.1, 1, 0), std::invalid_argument);
}

TEST_CASE("OU statistics: mean, variance, autocorrelation") {
    ModelParams p;
    p.kappa = 0.5;
    p.n_th = 4.0;
    const int n_paths = 20000;
    const double dt = 0.1;
    const double t_end = 6.0;
    const std::size_t n_lags = 5;

    // accumulate across trajectories at a fixed reference step
    const std::size_t ref = 10;
    Complex mean{};
    double mean_sq = 0.0, var_sq = 0.0;
    std::vector<Complex> corr(n_lags + 1, Complex{});
    for (int i = 0; i < n_paths; ++i) {
        const OUPath path = sample_ou_path(p, t_end, dt, 2024, i);
        const Complex a0 = path.alpha[ref];
        mean += a0;
        const double sq = std::norm(a0);
        mean_sq += sq;
        var_sq += sq * sq;
        for (std::size_t l = 0; l <= n_lags; ++l)
            corr[l] += std::conj(a0) * path.alpha[ref + 10 * l];
    }
    mean /= n_paths;
    mean_sq /= n_paths;
    var_sq = var_sq / n_paths - mean_sq * mean_sq;

    const double m = p.n_th / 2.0;
    // |alpha|^2 is exponentially distributed: se(mean) = m / sqrt(N)
    const double se_mean_sq = m / std::sqrt(double(n_paths));
    CHECK(std::abs(mean) < 4.0 * std::sqrt(m / n_paths));
    CHECK(std::abs(mean_sq - m) < 4.0 * se_mean_sq);
    CHECK(var_sq == doctest::Approx(m * m).epsilon(0.1));

    for (std::size_t l = 0; l <= n_lags; ++l) {
        const double tau = 10.0 * l * dt;
        const double expected = m * std::exp(-p.kappa * tau);
        // conservative error scale for the correlator estimate
        const double se = 1.5 * m / std::sqrt(double(n_paths));
        CHECK(std::abs(corr[l].real() / n_paths - expected) < 4.0 * se);
        CHECK(std::abs(corr[l].imag() / n_paths) < 4.0 * se);
    }
}

TEST_CASE("conditional propagation: silent field decays the qubits") {
    ModelParams p;
    p.kappa = 0.05;
    p.n_th = 0.0;
    OUPath silent;
    silent.dt = 0.02;
    // the singlet component drains only through the coherent exchange term
    // (rate ~ 0.7 gamma), so give it 30 / gamma
    const int n = 1501;
    silent.t.resize(n);
    silent.alpha.assign(n, Complex{0.0, 0.0});
    for (int i = 0; i < n; ++i) silent.t[i] = i * silent.dt;

    Matrix mu0 = Matrix::Zero(4, 4);
    mu0(3, 3) = 1.0;  // |11>
    const auto mus = propagate_conditional(silent, p, mu0);
    CHECK(trace_distance(mus.back(), ground_state()) < 1e-8);
    for (const Matrix& mu : mus) {
        CHECK(std::abs(mu.trace() - Complex(1.0)) < 1e-10);
        CHECK(is_hermitian(mu, 1e-10));
    }
}

TEST_CASE("conditional propagation relaxes into the frozen-field dark state") {
    ModelParams p;
    p.kappa = 0.02;
    p.n_th = 0.0;  // irrelevant for a frozen path
    const Complex alpha0{2.6, 1.4};

    OUPath frozen;
    frozen.dt = 0.02;
    const int n = 3501;  // t_end = 70 / gamma
    frozen.t.resize(n);
    frozen.alpha.assign(n, alpha0);
    for (int i = 0; i < n; ++i) frozen.t[i] = i * frozen.dt;

    const auto mus = propagate_conditional(frozen, p, ground_state());
    const Vector psi = dark_state(alpha0, p);
    const double fidelity = (psi.adjoint() * mus.back() * psi)(0).real();
    CHECK(fidelity > 1.0 - 1e-6);

    // dark-state algebra: annihilated by the collective jump and the driven
    // Hamiltonian
    CHECK((collective_lowering() * psi).norm() < 1e-14);
    CHECK((qubit_drive_hamiltonian(alpha0, p) * psi).norm() < 1e-12);

    // long-time conditional state is dark-state pure: no triplet, no double
    // occupation
    const Matrix mu_end = mus.back();
    CHECK(std::abs((triplet_ket().adjoint() * mu_end * triplet_ket())(0)) < 1e-8);
    CHECK(std::abs(mu_end(3, 3)) < 1e-8);
}

TEST_CASE("conditional propagation rejects too-coarse grids") {
    ModelParams p;
    p.kappa = 0.5;
    p.n_th = 200.0;
    OUPath coarse;
    coarse.dt = 0.2;
    coarse.t = {0.0, 0.2};
    coarse.alpha = {Complex{20.0, 0.0}, Complex{20.0, 0.0}};
    CHECK_THROWS_AS(propagate_conditional(coarse, p, ground_state()), StepTooCoarseError);
}

TEST_CASE("ensemble with a cold source stays in the ground state") {
    ModelParams p;
    p.kappa = 0.1;
    p.n_th = 0.0;
    EnsembleOptions opts;
    opts.n_traj = 100;
    opts.master_seed = 5;
    opts.output_points = 11;
    const TrajectoryEnsemble ens = ensemble_average(p, 5.0, opts);
    for (const Matrix& rho : ens.rho) CHECK(trace_distance(rho, ground_state()) < 1e-12);
}

TEST_CASE("ensemble average is deterministic and worker-count independent") {
    ModelParams p;
    p.kappa = 0.1;
    p.n_th = 1.5;
    EnsembleOptions opts;
    opts.n_traj = 160;
    opts.master_seed = 31;
    opts.output_points = 7;
    opts.workers = 1;
    const TrajectoryEnsemble one = ensemble_average(p, 4.0, opts);
    opts.workers = 2;
    const TrajectoryEnsemble two = ensemble_average(p, 4.0, opts);
    REQUIRE(one.rho.size() == two.rho.size());
    for (std::size_t k = 0; k < one.rho.size(); ++k) {
        CHECK(max_abs(Matrix(one.rho[k] - two.rho[k])) == 0.0);
        for (int q = 0; q < 4; ++q) CHECK(one.pop_se[k][q] == two.pop_se[k][q]);
    }
    CHECK_THROWS_AS(
        [&] {
            EnsembleOptions bad;
            bad.n_traj = 50;
            return ensemble_average(p, 1.0, bad);
        }(),
        std::invalid_argument);
}

TEST_CASE("grid halving leaves ensemble results within Monte-Carlo error") {
    ModelParams p;
    p.kappa = 0.1;
    p.n_th = 2.0;
    EnsembleOptions opts;
    opts.n_traj = 1500;
    opts.master_seed = 55;
    opts.steady_window_fraction = 0.5;
    opts.output_points = 10;
    opts.dt = 0.02;
    const TrajectoryEnsemble coarse = ensemble_average(p, 40.0, opts);
    opts.dt = 0.01;
    const TrajectoryEnsemble fine = ensemble_average(p, 40.0, opts);
    const auto dc = triplet_singlet_transform(0.5 * (coarse.steady_rho + coarse.steady_rho.adjoint()));
    const auto df = triplet_singlet_transform(0.5 * (fine.steady_rho + fine.steady_rho.adjoint()));
    const double pc[4] = {dc.p00, dc.pT, dc.pS, dc.p11};
    const double pf[4] = {df.p00, df.pT, df.pS, df.p11};
    for (int q = 0; q < 4; ++q) {
        const double sigma = std::hypot(coarse.steady_pop_se[q], fine.steady_pop_se[q]);
        CHECK(std::abs(pc[q] - pf[q]) < 3.0 * std::max(sigma, 1e-5));
    }
}

TEST_CASE("ensemble steady state matches the exact solver") {
    ModelParams p;
    p.kappa = 0.1;
    p.n_th = 2.0;
    EnsembleOptions opts;
    opts.n_traj = 2000;
    opts.master_seed = 77;
    opts.steady_window_fraction = 0.5;
    opts.output_points = 20;
    const TrajectoryEnsemble ens = ensemble_average(p, 60.0, opts);
    const Matrix rho = 0.5 * (ens.steady_rho + ens.steady_rho.adjoint());
    const auto d = triplet_singlet_transform(rho);

    const SteadyStateResult ex = steady_state_full(p);
    const auto de = triplet_singlet_transform(ex.rho_qubits);
    const double pops[4] = {d.p00, d.pT, d.pS, d.p11};
    const double exact[4] = {de.p00, de.pT, de.pS, de.p11};
    for (int q = 0; q < 4; ++q) {
        CAPTURE(q);
        CHECK(std::abs(pops[q] - exact[q]) < 4.0 * std::max(ens.steady_pop_se[q], 1e-4));
    }
}

TEST_CASE("phase diffusion model") {
    SUBCASE("default radius selects the stationary mean") {
        ModelParams p;
        p.kappa = 0.02;
        p.n_th = 8.0;
        const Matrix a = phase_diffusion_steady(p);
        const Matrix b = phase_diffusion_steady(p, std::sqrt(p.n_th / 2.0));
        CHECK(max_abs(Matrix(a - b)) == 0.0);
    }
    SUBCASE("zero radius is rejected") {
        ModelParams p;
        p.n_th = 0.0;
        CHECK_THROWS_AS(phase_diffusion_steady(p), std::invalid_argument);
    }
    SUBCASE("small bandwidth approaches the frozen-drive dark state") {
        ModelParams p;
        p.kappa = 1e-4;
        p.n_th = 2.0 / (8.0 * p.kappa);  // 8 kappa r0^2 = gamma at the default radius
        const Matrix rho = phase_diffusion_steady(p);
        const Vector psi = dark_state(std::sqrt(p.n_th / 2.0), p);
        const auto d = triplet_singlet_transform(rho);
        CHECK(d.p00 == doctest::Approx(std::norm(psi(0))).epsilon(2e-3));
        const double ps_dark = std::norm((singlet_ket().adjoint() * psi)(0));
        CHECK(d.pS == doctest::Approx(ps_dark).epsilon(2e-3));
        CHECK(d.pT < 1e-3);
        CHECK(d.p11 < 1e-3);
    }
    SUBCASE("concurrence grows monotonically with occupation at fixed bandwidth") {
        ModelParams p;
        p.kappa = 0.01;
        double prev = -1.0;
        for (double nth : {10.0, 100.0, 1000.0, 10000.0}) {
            p.n_th = nth;
            const double c = concurrence(phase_diffusion_steady(p));
            CHECK(c > prev);
            prev = c;
        }
        CHECK(prev > 0.5);  // deep in the entangled regime at n_th = 1e4
    }
}
