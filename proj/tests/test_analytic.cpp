#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "thermalink/analytic.hpp"
#include "thermalink/solvers.hpp"
#include "thermalink/special_functions.hpp"

using namespace thermalink;

TEST_CASE("markov closed form") {
    const AnalyticPrediction p0 = markov_steady(0.0);
    CHECK(p0.p00 == doctest::Approx(1.0));
    CHECK(p0.pT + p0.pS + p0.p11 == doctest::Approx(0.0));

    const AnalyticPrediction p1 = markov_steady(1.0);
    CHECK(p1.p00 == doctest::Approx(4.0 / 9.0));
    CHECK(p1.pT == doctest::Approx(2.0 / 9.0));
    CHECK(p1.pS == doctest::Approx(2.0 / 9.0));
    CHECK(p1.p11 == doctest::Approx(1.0 / 9.0));

    // the assembled state is separable for any occupation (general formula)
    for (double n : {0.3, 1.0, 4.0, 50.0}) {
        const AnalyticPrediction p = markov_steady(n);
        CHECK(concurrence(p.as_density_matrix()) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.p00 + p.pT + p.pS + p.p11 == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("quasistatic closed form") {
    CHECK(quasistatic_steady(0.0).concurrence == doctest::Approx(0.0));
    const AnalyticPrediction p = quasistatic_steady(0.125);
    CHECK(p.concurrence == doctest::Approx(1.0 - upsilon(0.125)).epsilon(1e-14));
    CHECK(p.concurrence == doctest::Approx(0.40365263767680715).epsilon(1e-12));
    CHECK(p.p00 + p.pS == doctest::Approx(1.0));

    // strictly increasing in the flux
    double prev = -1.0;
    for (int k = 0; k <= 40; ++k) {
        const double x = std::pow(10.0, -3.0 + 5.0 * k / 40.0);
        const double c = quasistatic_steady(x).concurrence;
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("bourret populations") {
    SUBCASE("no flux") {
        ModelParams p;
        p.kappa = 0.2;
        p.n_th = 0.0;
        CHECK(bourret_steady_lowest(p).p00 == doctest::Approx(1.0));
        CHECK(bourret_steady_full(p).p00 == doctest::Approx(1.0));
    }
    SUBCASE("lowest order at kappa -> 0 with phi = gamma/8") {
        // substituting phi = gamma/8 at vanishing kappa: rho_S = rho_00 = 1/2
        ModelParams p;
        p.kappa = 1e-12;
        p.n_th = 2.0 * (1.0 / 8.0) / p.kappa;
        const AnalyticPrediction low = bourret_steady_lowest(p);
        CHECK(low.pS == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(low.p00 == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(low.pT == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(low.p11 == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("full forms are normalized for random parameters") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> uni(0.01, 10.0);
        for (int k = 0; k < 1000; ++k) {
            ModelParams p;
            p.gamma1 = p.gamma2 = uni(rng);
            p.kappa = uni(rng);
            p.n_th = uni(rng);
            const AnalyticPrediction full = bourret_steady_full(p);
            CHECK(full.p00 + full.pT + full.pS + full.p11 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(full.p00 >= 0.0);
            CHECK(full.pT >= 0.0);
            CHECK(full.pS >= 0.0);
            CHECK(full.p11 >= 0.0);
        }
    }
}

TEST_CASE("bourret concurrence closed form") {
    SUBCASE("kappa = 0 limit") {
        ModelParams p;
        p.kappa = 1e-14;
        p.n_th = 2.0 * 0.5 / p.kappa;  // phi = gamma/2
        const double phi = p.photon_flux();
        CHECK(bourret_concurrence(p) ==
              doctest::Approx(8.0 * phi / (1.0 + 8.0 * phi)).epsilon(1e-6));
    }
    SUBCASE("large flux saturation at 1 - 4 kappa/gamma") {
        ModelParams p;
        p.kappa = 0.01;
        p.n_th = 2.0e9;  // phi = 1e7 gamma
        CHECK(bourret_concurrence(p) == doctest::Approx(1.0 - 4.0 * p.kappa).epsilon(1e-3));
    }
    SUBCASE("matches the triplet-singlet expression of the lowest-order state") {
        for (double kappa : {1e-3, 1e-2, 0.05}) {
            ModelParams p;
            p.kappa = kappa;
            p.n_th = 2.0;
            const AnalyticPrediction low = bourret_steady_lowest(p);
            const double from_pops =
                low.pS - low.pT - 2.0 * std::sqrt(std::max(0.0, low.p00 * low.p11));
            CHECK(bourret_concurrence_unclipped(p) ==
                  doctest::Approx(from_pops).epsilon(20.0 * kappa));
        }
    }
}

TEST_CASE("bourret reduces to the quasistatic lowest-order term as kappa -> 0") {
    ModelParams p;
    p.kappa = 1e-9;
    p.n_th = 2.0 * 1.3 / p.kappa;  // phi = 1.3 gamma
    const double phi = p.photon_flux();
    const double c = bourret_concurrence(p);
    const double limit = 8.0 * phi / (1.0 + 8.0 * phi);
    CHECK(std::abs(c - limit) / limit < 1e-4);
}

TEST_CASE("full bourret forms reduce to the lowest order in kappa") {
    // Richardson check: (full - lowest)/kappa converges as kappa -> 0
    ModelParams p;
    p.n_th = 3.0;
    auto gap = [&](double kappa) {
        p.kappa = kappa;
        const AnalyticPrediction f = bourret_steady_full(p);
        const AnalyticPrediction l = bourret_steady_lowest(p);
        return std::max({std::abs(f.p00 - l.p00), std::abs(f.pT - l.pT), std::abs(f.pS - l.pS),
                         std::abs(f.p11 - l.p11)});
    };
    // the residual difference is O(kappa^2) once the shared O(kappa) terms cancel
    const double g4 = gap(1e-4);
    const double g5 = gap(1e-5);
    CHECK(g4 / g5 > 50.0);
    CHECK(g4 / g5 < 200.0);
}

TEST_CASE("kappa_max bracket") {
    for (double n_th = 1.0; n_th <= 10.0; n_th += 1.0) {
        ModelParams p;
        p.n_th = n_th;
        const double k_max = kappa_max(p);
        CAPTURE(n_th);
        CHECK(k_max >= 0.18);
        CHECK(k_max < 0.25);
        // sign change around the root
        ModelParams lo = p, hi = p;
        lo.kappa = 0.95 * k_max;
        hi.kappa = 1.05 * k_max;
        CHECK(bourret_concurrence_unclipped(lo) > 0.0);
        CHECK(bourret_concurrence_unclipped(hi) < 0.0);
    }
    ModelParams bad;
    bad.n_th = 0.0;
    CHECK_THROWS_AS(kappa_max(bad), std::invalid_argument);
}

TEST_CASE("coherence functions") {
    const CoherencePair at0 = coherence_functions(0.3, 0.0);
    CHECK(at0.g1 == doctest::Approx(1.0));
    CHECK(at0.g2 == doctest::Approx(2.0));
    const CoherencePair far = coherence_functions(0.3, 1e4);
    CHECK(far.g1 == doctest::Approx(0.0));
    CHECK(far.g2 == doctest::Approx(1.0));
    for (double tau : {0.0, 0.3, 2.0, 11.0}) {
        const CoherencePair c = coherence_functions(0.7, tau);
        CHECK(c.g2 - 1.0 == doctest::Approx(c.g1 * c.g1).epsilon(1e-14));
    }
    CHECK_THROWS_AS(coherence_functions(0.3, -1.0), std::invalid_argument);
}

TEST_CASE("thermal occupation") {
    // room-temperature source filtered at 5 GHz
    CHECK(thermal_occupation(293.0, 5e9) == doctest::Approx(1220.0).epsilon(5e-3));
    // 50 GHz spin qubits at 300 K: the Bose factor gives ~1.2e2
    const double n50 = thermal_occupation(300.0, 50e9);
    CHECK(n50 == doctest::Approx(124.5).epsilon(0.01));
    CHECK(n50 > 80.0);
    CHECK(n50 < 150.0);
    // deep quantum regime
    CHECK(thermal_occupation(0.01, 5e9) < 1e-9);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 5e9), std::invalid_argument);
}
