#include "thermalink/cfrac.hpp"

#include "thermalink/solvers.hpp"
#include "thermalink/special_functions.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>

namespace thermalink {

PhaseSpaceModel cascaded_phase_space_model(const ModelParams& params) {
    params.validate();
    PhaseSpaceModel m;
    m.dim = 4;
    m.l_q = qubit_cascade_generator(params);
    m.l_plus = drive_plus_generator(params);
    m.l_minus = drive_minus_generator(params);
    m.kappa = params.kappa;
    m.n_th = params.n_th;
    m.provenance = "cascaded";
    return m;
}

PhaseSpaceModel three_level_phase_space_model(const ModelParams& params) {
    params.validate();
    // Project onto {|00>, |S>, |T>}: rotate to the triplet-singlet basis and
    // drop the |11> row/column of every operator before vectorization.
    const Matrix u = triplet_singlet_basis();  // columns |00>, |T>, |S>, |11>
    Matrix p = Matrix::Zero(4, 3);             // keep order {|00>, |S>, |T>}
    p.col(0) = u.col(0);
    p.col(1) = u.col(2);
    p.col(2) = u.col(1);
    auto project = [&](const Matrix& op4) -> Matrix { return p.adjoint() * op4 * p; };

    const double gamma_eff = std::sqrt(params.gamma1 * params.gamma2 * (1.0 - params.p_loss));
    const Matrix h3 = project(0.5 * params.delta1 * qubit_sigma_z(1) +
                              0.5 * params.delta2 * qubit_sigma_z(2) +
                              cascade_hamiltonian(gamma_eff));
    const double g1_kept = params.gamma1 * (1.0 - params.p_loss);
    const Matrix l_casc3 = project(std::sqrt(g1_kept) * qubit_sigma_minus(1) +
                                   std::sqrt(params.gamma2) * qubit_sigma_minus(2));

    PhaseSpaceModel m;
    m.dim = 3;
    m.l_q = hamiltonian_generator(h3) + dissipator(l_casc3);
    if (params.p_loss > 0.0)
        m.l_q += params.gamma1 * params.p_loss * dissipator(project(qubit_sigma_minus(1)));
    if (params.gamma_phi > 0.0)
        m.l_q += 0.5 * params.gamma_phi *
                 (dissipator(project(qubit_sigma_z(1))) + dissipator(project(qubit_sigma_z(2))));
    const Matrix cp = std::sqrt(params.gamma1 * params.kappa) * project(qubit_sigma_plus(1)) +
                      std::sqrt(params.gamma2 * params.kappa) * project(qubit_sigma_plus(2));
    const Matrix cm = std::sqrt(params.gamma1 * params.kappa) * project(qubit_sigma_minus(1)) +
                      std::sqrt(params.gamma2 * params.kappa) * project(qubit_sigma_minus(2));
    m.l_plus = spost(cp) - spre(cp);
    m.l_minus = spre(cm) - spost(cm);
    m.kappa = params.kappa;
    m.n_th = params.n_th;
    m.provenance = "three-level";
    return m;
}

namespace {

// Per-level blocks of the recurrence A_n sigma^n + B_n sigma^{n-1} + C_n sigma^{n+1} = 0,
// with sigma^n = (mu^{n,0}, mu^{n,1}, mu^{n,-1}) stacked on the vectorized qubit space.
struct BlockBuilder {
    const PhaseSpaceModel& m;
    int ld;  // dim^2
    Matrix id;
    bool include_m2;

    BlockBuilder(const PhaseSpaceModel& model, bool with_m2)
        : m(model), ld(model.dim * model.dim), id(Matrix::Identity(ld, ld)),
          include_m2(with_m2) {}

    // resolvent [kappa x I - L_q]^{-1} applied to a matrix
    Matrix resolvent_apply(double x, const Matrix& rhs) const {
        return Eigen::PartialPivLU<Matrix>(m.kappa * x * id - m.l_q).solve(rhs);
    }

    // P^x_pm = (n_th/2) L_pm [kappa(2n+x) I - L_q]^{-1} L_mp
    Matrix p_plus(int n, int x) const {
        return 0.5 * m.n_th * m.l_plus * resolvent_apply(2.0 * n + x, m.l_minus);
    }
    Matrix p_minus(int n, int x) const {
        return 0.5 * m.n_th * m.l_minus * resolvent_apply(2.0 * n + x, m.l_plus);
    }

    struct Level {
        Matrix a, b, c;
    };

    Level build(int n) const {
        const double root_np1 = std::sqrt(0.5 * m.n_th * (n + 1.0));
        const double root_1 = std::sqrt(0.5 * m.n_th);
        Matrix p2p = Matrix::Zero(ld, ld), p2m = p2p, p0p = p2p, p0m = p2p;
        if (include_m2 && m.n_th > 0.0) {
            p2p = p_plus(n, 2);
            p2m = p_minus(n, 2);
            if (n >= 1) {
                p0p = p_plus(n, 0);
                p0m = p_minus(n, 0);
            }
        }
        const Matrix a_p = m.kappa * (2.0 * n + 1.0) * id - m.l_q - (n + 2.0) * p2p -
                           static_cast<double>(n) * p0p;
        const Matrix a_m = m.kappa * (2.0 * n + 1.0) * id - m.l_q - (n + 2.0) * p2m -
                           static_cast<double>(n) * p0m;

        Level lv;
        lv.a = Matrix::Zero(3 * ld, 3 * ld);
        lv.a.block(0, 0, ld, ld) = -(m.l_q - 2.0 * n * m.kappa * id);
        lv.a.block(0, ld, ld, ld) = -root_np1 * m.l_plus;
        lv.a.block(0, 2 * ld, ld, ld) = -root_np1 * m.l_minus;
        lv.a.block(ld, 0, ld, ld) = -root_np1 * m.l_minus;
        lv.a.block(ld, ld, ld, ld) = a_p;
        lv.a.block(2 * ld, 0, ld, ld) = -root_np1 * m.l_plus;
        lv.a.block(2 * ld, 2 * ld, ld, ld) = a_m;

        lv.b = Matrix::Zero(3 * ld, 3 * ld);
        if (n >= 1) {
            const double rn = std::sqrt(static_cast<double>(n));
            lv.b.block(0, ld, ld, ld) = rn * root_1 * m.l_plus;
            lv.b.block(0, 2 * ld, ld, ld) = rn * root_1 * m.l_minus;
            lv.b.block(ld, ld, ld, ld) = rn * std::sqrt(n + 1.0) * p0p;
            lv.b.block(2 * ld, 2 * ld, ld, ld) = rn * std::sqrt(n + 1.0) * p0m;
        }

        lv.c = Matrix::Zero(3 * ld, 3 * ld);
        const double rnp1 = std::sqrt(n + 1.0);
        lv.c.block(ld, 0, ld, ld) = rnp1 * root_1 * m.l_minus;
        lv.c.block(ld, ld, ld, ld) = rnp1 * std::sqrt(n + 2.0) * p2p;
        lv.c.block(2 * ld, 0, ld, ld) = rnp1 * root_1 * m.l_plus;
        lv.c.block(2 * ld, 2 * ld, ld, ld) = rnp1 * std::sqrt(n + 2.0) * p2m;
        return lv;
    }
};

struct McfRun {
    Vector sigma0;            // stacked (mu^{n,0}, mu^{n,1}, mu^{n,-1}) at n = 0
    std::vector<Matrix> s;    // ladder maps sigma^n = S_n sigma^{n-1}, n = 1..n_max
};

Matrix block_to_cols(const Vector& sig, int ld) {
    Matrix out(ld, 3);
    for (int j = 0; j < 3; ++j) out.col(j) = sig.segment(j * ld, ld);
    return out;
}

// Hermitized, trace-normalized mu^{0,0} component.
Matrix extract_mu00(const Vector& sigma0, int dim) {
    Matrix mu = unvec(sigma0.head(dim * dim), dim);
    mu = 0.5 * (mu + mu.adjoint()).eval();
    mu /= mu.trace().real();
    return mu;
}

McfRun run_mcf(const PhaseSpaceModel& model, int n_max, bool include_m2, bool keep_ladders) {
    const BlockBuilder bb(model, include_m2);
    const int ld = model.dim * model.dim;
    const int bd = 3 * ld;

    // Backward recursion S_n = -(A_n + C_n S_{n+1})^{-1} B_n.
    Matrix s_next = Matrix::Zero(bd, bd);
    std::vector<Matrix> ladders;
    if (keep_ladders) ladders.resize(n_max);
    for (int n = n_max; n >= 1; --n) {
        const BlockBuilder::Level lv = bb.build(n);
        s_next = -Eigen::PartialPivLU<Matrix>(lv.a + lv.c * s_next).solve(lv.b);
        if (keep_ladders) ladders[n - 1] = s_next;
    }

    const BlockBuilder::Level l0 = bb.build(0);
    Matrix m0 = l0.a + l0.c * s_next;  // (A_0 + K) sigma^0 = 0

    // Append the trace-normalization row tr(mu^{0,0}) = 1 and solve least squares.
    Matrix sys(bd + 1, bd);
    sys.topRows(bd) = m0;
    sys.row(bd).setZero();
    for (int i = 0; i < model.dim; ++i) sys(bd, i * model.dim + i) = 1.0;
    Vector rhs = Vector::Zero(bd + 1);
    rhs(bd) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(sys);
    if (qr.rank() < bd)
        throw CfracConvergenceError("mcf_steady: singular block system at n_max=" +
                                    std::to_string(n_max));
    McfRun run;
    run.sigma0 = qr.solve(rhs);
    run.s = std::move(ladders);
    return run;
}

std::array<double, 4> mode_populations(const Matrix& mu00, int dim) {
    // populations ordered (p00, pT, pS, p11); dim-3 basis is {|00>, |S>, |T>}
    std::array<double, 4> p{};
    if (dim == 4) {
        const TripletSingletDecomposition d = triplet_singlet_transform(mu00);
        p = {d.p00, d.pT, d.pS, d.p11};
    } else {
        p = {mu00(0, 0).real(), mu00(2, 2).real(), mu00(1, 1).real(), 0.0};
    }
    return p;
}

CfracSolution finalize_solution(const PhaseSpaceModel& model, const McfRun& run, int n_max,
                                bool converged, const McfOptions& opts) {
    const int ld = model.dim * model.dim;
    CfracSolution sol;
    sol.n_max = n_max;
    sol.converged = converged;
    sol.provenance = model.provenance;

    const Matrix mu00 = extract_mu00(run.sigma0, model.dim);
    sol.rho_q = mu00;

    const auto p = mode_populations(mu00, model.dim);
    sol.p00 = p[0];
    sol.pT = p[1];
    sol.pS = p[2];
    sol.p11 = p[3];

    // Approximate routes (e.g. with the cavity backaction dropped) can return
    // a state with small negative eigenvalues; record the negativity and
    // evaluate the concurrence on the clipped state.
    Eigen::SelfAdjointEigenSolver<Matrix> es(mu00);
    sol.min_eigenvalue = es.eigenvalues().minCoeff();
    Vector clipped = es.eigenvalues().cwiseMax(0.0).cast<Complex>();
    Matrix rho_psd = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    rho_psd /= rho_psd.trace().real();
    if (model.dim == 4)
        sol.concurrence = concurrence(rho_psd);
    else
        sol.concurrence = concurrence_x_diagonal(sol.p00, sol.pT, sol.pS, sol.p11);

    // Forward reconstruction sigma^n = S_n sigma^{n-1}: tail diagnostic and
    // optional mode output.
    if (!run.s.empty()) {
        Vector sig = run.sigma0;
        const double norm0 = sig.norm();
        if (opts.keep_modes) sol.modes.push_back(block_to_cols(sig, ld));
        for (const Matrix& s_n : run.s) {  // s[0] = S_1, applied upward in n
            sig = s_n * sig;
            if (opts.keep_modes) sol.modes.push_back(block_to_cols(sig, ld));
        }
        sol.tail_ratio = norm0 > 0.0 ? sig.norm() / norm0 : 0.0;
    }
    return sol;
}

}  // namespace

CfracSolution mcf_steady(const PhaseSpaceModel& model, const McfOptions& opts) {
    if (!(model.kappa > 0.0)) throw std::invalid_argument("mcf_steady: kappa must be > 0");

    if (opts.depth_override >= 0) {
        McfRun run = run_mcf(model, opts.depth_override, opts.include_m2, true);
        return finalize_solution(model, run, opts.depth_override, true, opts);
    }

    int n_max = opts.n_max > 0
                    ? opts.n_max
                    : static_cast<int>(std::ceil(std::sqrt(std::max(model.n_th, 0.0)))) + 8;
    n_max = std::max(n_max, 4);

    McfRun run = run_mcf(model, n_max, opts.include_m2, false);
    auto pops = mode_populations(extract_mu00(run.sigma0, model.dim), model.dim);
    while (true) {
        const int n_probe = n_max + 8;
        if (n_probe > opts.n_max_ceiling)
            throw CfracConvergenceError("mcf_steady: no convergence below n_max ceiling " +
                                        std::to_string(opts.n_max_ceiling));
        McfRun probe = run_mcf(model, n_probe, opts.include_m2, true);
        auto probe_pops = mode_populations(extract_mu00(probe.sigma0, model.dim), model.dim);
        double shift = 0.0;
        for (int i = 0; i < 4; ++i) shift = std::max(shift, std::abs(probe_pops[i] - pops[i]));
        if (shift < opts.convergence_tol) {
            return finalize_solution(model, probe, n_probe, true, opts);
        }
        n_max = std::max(n_probe, (3 * n_max) / 2);
        run = run_mcf(model, n_max, opts.include_m2, false);
        pops = mode_populations(extract_mu00(run.sigma0, model.dim), model.dim);
    }
}

CfracSolution mcf_steady(const ModelParams& params, const McfOptions& opts) {
    return mcf_steady(cascaded_phase_space_model(params), opts);
}

// --- scalar continued fractions ------------------------------------------------

ScalarCfResult scalar_cf_eval(const ScalarRecurrence& rec, double y0, double y1, int depth) {
    if (depth < 1) throw std::invalid_argument("scalar_cf_eval: depth must be >= 1");
    // s_n = b_n / (a_n - c_n s_{n+1}) from the tail down to n = 2.
    double s = 0.0;
    for (int n = depth; n >= 2; --n) {
        const double den = rec.a(n) - rec.c(n) * s;
        if (std::abs(den) < 1e-300)
            throw std::runtime_error("scalar_cf_eval: vanishing denominator at depth " +
                                     std::to_string(n));
        s = rec.b(n) / den;
    }
    const double t = rec.a(1) - rec.c(1) * s;
    if (std::abs(t) < 1e-300) throw std::runtime_error("scalar_cf_eval: vanishing pivot at n=1");
    ScalarCfResult out;
    out.f2 = rec.c(0) / t;
    const double den0 = rec.a(0) - rec.c(0) * rec.b(1) / t;
    if (std::abs(den0) < 1e-300) throw std::runtime_error("scalar_cf_eval: vanishing pivot at n=0");
    out.f1 = 1.0 / den0;
    out.x0 = out.f1 * (y0 + out.f2 * y1);
    out.depth = depth;
    return out;
}

ScalarCfResult scalar_cf_eval_adaptive(const ScalarRecurrence& rec, double y0, double y1,
                                       int initial_depth) {
    ScalarCfResult prev = scalar_cf_eval(rec, y0, y1, initial_depth);
    for (int depth = 2 * initial_depth; depth <= (1 << 22); depth *= 2) {
        ScalarCfResult next = scalar_cf_eval(rec, y0, y1, depth);
        const double scale = std::max({1.0, std::abs(next.x0)});
        if (std::abs(next.x0 - prev.x0) < 1e-12 * scale &&
            std::abs(next.f1 - prev.f1) <= 1e-12 * std::max(1.0, std::abs(next.f1)) &&
            std::abs(next.f2 - prev.f2) <= 1e-12 * std::max(1.0, std::abs(next.f2))) {
            next.converged = true;
            return next;
        }
        prev = next;
    }
    return prev;  // converged stays false
}

ScalarRecurrence population_recurrence(double gamma, double kappa, double phi) {
    ScalarRecurrence rec;
    const double g2 = gamma * gamma;
    rec.a = [=](int n) { return g2 + 8.0 * phi * ((2.0 * n + 1.0) * gamma + 3.0 * kappa); };
    rec.b = [=](int n) { return 8.0 * n * phi * gamma; };
    rec.c = [=](int n) { return 8.0 * (n + 1.0) * phi * gamma; };
    return rec;
}

ThreeLevelResult three_level_cf_steady(const ModelParams& params, int depth) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    ThreeLevelResult out;
    if (phi == 0.0) {
        out.converged = true;
        return out;
    }
    const ScalarRecurrence rec = population_recurrence(g, k, phi);
    const double y0_s = 8.0 * phi * (g + k);
    const double y1_s = -8.0 * phi * (g + 3.0 * k + 48.0 * phi * k * k / (g * g));
    const double y0_t = 8.0 * phi * k;
    const double y1_t = 3.0 * std::pow(8.0 * phi * k, 2) / (g * g);

    ScalarCfResult s = depth > 0 ? scalar_cf_eval(rec, y0_s, y1_s, depth)
                                 : scalar_cf_eval_adaptive(rec, y0_s, y1_s);
    ScalarCfResult t = depth > 0 ? scalar_cf_eval(rec, y0_t, y1_t, depth)
                                 : scalar_cf_eval_adaptive(rec, y0_t, y1_t);
    out.pS = s.x0;
    out.pT = t.x0;
    out.depth = s.depth;
    out.converged = depth > 0 ? true : (s.converged && t.converged);
    out.concurrence = std::max(0.0, out.pS - out.pT);
    return out;
}

// --- closed forms ---------------------------------------------------------------

ClosedFormPopulations closed_form_populations(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    ClosedFormPopulations out;
    if (phi == 0.0) return out;
    const double g2 = g * g;
    out.phi_eff = phi * g2 / (g2 + 24.0 * k * phi);
    const double ups = upsilon(out.phi_eff / g);
    out.pS_lowest = 1.0 - ups * (1.0 + 16.0 * k * phi / g2);
    out.pT_lowest = 8.0 * k * phi / g2 * ups;
    const double bracket = ups * (1.0 + 3.0 * k / g) - 3.0 * k / g;
    out.pS_full = 1.0 - bracket * (1.0 + 16.0 * k * phi / g2);
    out.pT_full = 8.0 * k * phi / g2 * bracket;
    return out;
}

double closed_form_concurrence(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    if (phi == 0.0) return 0.0;
    const double g2 = g * g;
    const double phi_eff = phi * g2 / (g2 + 24.0 * k * phi);
    return std::max(0.0, 1.0 - upsilon(phi_eff / g) * (1.0 + 24.0 * k * phi / g2));
}

OptimalOccupation optimal_occupation(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    OptimalOccupation out;
    out.n_star_analytic = g * g / (12.0 * k * k);
    out.c_star_analytic = 1.0 - 2.0 * upsilon(g / (48.0 * k));

    // Golden-section maximization of the closed form over log n_th.
    auto value = [&](double log_n) {
        ModelParams p = params;
        p.n_th = std::exp(log_n);
        return closed_form_concurrence(p);
    };
    const double phi_ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::log(out.n_star_analytic) - std::log(100.0);
    double hi = std::log(out.n_star_analytic) + std::log(100.0);
    double x1 = hi - phi_ratio * (hi - lo);
    double x2 = lo + phi_ratio * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi_ratio * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi_ratio * (hi - lo);
            f1 = value(x1);
        }
    }
    out.n_star_numeric = std::exp(0.5 * (lo + hi));
    out.c_star_numeric = value(0.5 * (lo + hi));
    return out;
}

}  // namespace thermalink
