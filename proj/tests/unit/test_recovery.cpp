#include <doctest.h>

#include "canm/certificate.hpp"
#include "canm/error.hpp"
#include "canm/sdp_solver.hpp"
#include "canm/source_recovery.hpp"
#include "support.hpp"

using namespace canm;

TEST_CASE("peaks of a cosine")
{
    ComplexVector q = ComplexVector::Zero(3);
    q[1] = 1.0;
    const auto peaks = peaks_of_dual(TrigPolynomial(q), 48, 0.99);
    REQUIRE(peaks.size() == 1);
    CHECK(circle_distance(peaks[0], 0.0) < 1e-10);

    ComplexVector c = ComplexVector::Zero(4);
    c[0] = 0.5;
    CHECK(peaks_of_dual(TrigPolynomial(c), 64, 0.9).empty());
}

TEST_CASE("strongest_peaks ranks the maxima")
{
    // Re Q = 0.6 cos 2πτ + 0.3 cos 6πτ has maxima of different heights.
    ComplexVector q = ComplexVector::Zero(4);
    q[1] = 0.6;
    q[3] = 0.3;
    const TrigPolynomial poly(q);
    const auto all = peaks_of_dual(poly, 256, -10.0);
    const auto top = strongest_peaks(poly, 256, 1);
    REQUIRE(top.size() == 1);
    CHECK(circle_distance(top[0], 0.0) < 1e-8);
    CHECK(strongest_peaks(poly, 256, 100).size() == all.size());
}

TEST_CASE("vandermonde decomposition")
{
    const SourceEstimate one = vandermonde_decompose(3.0 * atom(0.7, 16));
    REQUIRE(one.count() == 1);
    CHECK(one.taus[0] == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(one.amplitudes[0] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(one.residual <= 1e-8);

    const SourceEstimate none = vandermonde_decompose(ComplexVector::Zero(8));
    CHECK(none.count() == 0);
    CHECK(none.residual == 0.0);

    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> taus;
        while (taus.size() < 8) {
            const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            bool ok = true;
            for (double s : taus) ok = ok && circle_distance(s, t) >= 1.0 / 28.0;
            if (ok) taus.push_back(t);
        }
        std::sort(taus.begin(), taus.end());
        const std::vector<double> ones(8, 1.0);
        const SourceEstimate est = vandermonde_decompose(test::brute_signal(taus, ones, 28));
        REQUIRE(est.count() == 8);
        for (std::size_t k = 0; k < 8; ++k) CHECK(circle_distance(est.taus[k], taus[k]) <= 1e-6);
        for (double a : est.amplitudes) CHECK(a >= 0.0);
    }

    ComplexVector bad = atom(0.2, 6);
    bad[0] = -1.0;
    CHECK_THROWS_AS(vandermonde_decompose(bad), NotPsdError);
}

TEST_CASE("synthesize matches the direct sum")
{
    const std::vector<double> taus{0.1, 0.45};
    const std::vector<double> amps{1.5, 0.25};
    CHECK((synthesize(taus, amps, 9) - test::brute_signal(taus, amps, 9)).norm() < 1e-13);
}

TEST_CASE("fit_atoms polishes candidate locations")
{
    const std::vector<double> taus{0.2, 0.61};
    const std::vector<double> amps{1.0, 0.7};
    const ComplexVector x = test::brute_signal(taus, amps, 20);
    const IndexSet known({0, 1, 2, 3, 5, 8, 13, 19}, 20);
    const std::vector<double> guesses{0.205, 0.6, 0.9};
    const SourceEstimate est = fit_atoms(guesses, x, known);
    REQUIRE(est.count() == 2);
    CHECK(circle_distance(est.taus[0], 0.2) < 1e-8);
    CHECK(circle_distance(est.taus[1], 0.61) < 1e-8);
    CHECK(est.amplitudes[1] == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("match_sources uses the circle metric")
{
    const std::vector<double> truth{0.1, 0.4, 0.8};
    const MatchReport same = match_sources(truth, truth);
    CHECK(same.matches.size() == 3);
    CHECK(same.max_error == 0.0);

    std::vector<double> shifted;
    for (double t : truth) shifted.push_back(wrap_unit(t + 0.001));
    CHECK(match_sources(shifted, truth).max_error == doctest::Approx(0.001).epsilon(1e-9));

    const std::vector<double> a{0.02, 0.98};
    const std::vector<double> b{0.98, 0.02};
    const MatchReport wrap = match_sources(b, a);
    CHECK(wrap.max_error < 1e-15);

    const std::vector<double> est{0.1, 0.5};
    const MatchReport gaps = match_sources(est, truth, 0.01);
    CHECK(gaps.matches.size() == 1);
    CHECK(gaps.missed.size() == 2);
    CHECK(gaps.spurious.size() == 1);
}

TEST_CASE("peak picking and vandermonde agree on certified instances")
{
    std::mt19937_64 rng(311);
    const IndexSet j = cantor_array(3);
    const IndexSet omega = difference_set(j);
    for (int trial = 0; trial < 5; ++trial) {
        const auto taus = test::random_taus(rng, 3);
        const auto amps = test::random_amplitudes(rng, 3);
        REQUIRE(certify_recovery(taus, amps, j, omega, 10));
        ProblemSpec spec;
        spec.n = 10;
        spec.omega = omega;
        spec.observed = SelectionOperator(omega).apply(test::brute_signal(taus, amps, 10));
        spec.compression = j;
        const SdpSolution sol = solve(spec);
        REQUIRE(sol.converged());
        const SourceEstimate vd = vandermonde_decompose(sol.x_hat);
        const auto peaks = peaks_of_dual(dual_polynomial(sol).polynomial, 160, 1.0 - 1e-6);
        REQUIRE(vd.count() == 3);
        CHECK(match_sources(peaks, vd.taus).max_error <= 1e-4);
        CHECK(match_sources(vd.taus, taus).max_error <= 1e-5);
    }
}
