#include <doctest.h>

#include "canm/certificate.hpp"
#include "canm/error.hpp"
#include "canm/sdp_solver.hpp"
#include "support.hpp"

using namespace canm;

TEST_CASE("three-sample certificate for a source at zero")
{
    const std::vector<double> taus{0.0};
    const Certificate cert = construct_certificate(taus, IndexSet({0, 1}, 3), 3);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(cert.u[0] - r) < 1e-12);
    CHECK(std::abs(cert.u[1] + r) < 1e-12);
    CHECK(std::abs(cert.p[0] - r) < 1e-12);
    CHECK(std::abs(cert.p[1] + r) < 1e-12);
    CHECK(std::abs(cert.p[2]) == 0.0);
    CHECK(std::abs(cert.q[0]) < 1e-12);
    CHECK(std::abs(cert.q[1] - 1.0) < 1e-12);
    CHECK(std::abs(cert.q[2]) == 0.0);
    const TrigPolynomial q = cert.q_polynomial();
    for (double t : uniform_grid(64)) CHECK(std::abs(q(t).real() - std::cos(kTwoPi * t)) < 1e-12);
}

TEST_CASE("certificates satisfy the coefficient and pointwise identities")
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 6 + rng() % 40;
        const std::size_t m = 2 + rng() % (n / 2);
        const std::size_t p = 1 + rng() % (m - 1);
        const IndexSet i = test::random_compression(rng, n, m);
        const auto taus = test::random_taus(rng, p);
        const Certificate cert = construct_certificate(taus, i, n);

        CHECK(std::abs(cert.q[0] - (1.0 - cert.p.squaredNorm())) < 1e-12);
        for (std::size_t k = 0; k < n; ++k) {
            if (!i.contains(static_cast<IndexSet::value_type>(k))) CHECK(cert.p[static_cast<Index>(k)] == Complex(0, 0));
        }
        const IndexSet di = difference_set(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (!di.contains(static_cast<IndexSet::value_type>(k))) CHECK(cert.q[static_cast<Index>(k)] == Complex(0, 0));
        }

        ComplexVector lhs = -apply_k(cert.q);
        lhs[0] += 1.0;
        const ComplexVector rhs = toeplitz_adjoint(cert.p * cert.p.adjoint());
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

        const auto grid = uniform_grid(4096);
        const ComplexVector qv = cert.q_polynomial().evaluate(grid);
        const ComplexVector pv = cert.p_polynomial().evaluate(grid);
        for (Index g = 0; g < qv.size(); ++g) {
            CHECK(std::abs(1.0 - qv[g].real() - std::norm(pv[g])) < 1e-9);
            CHECK(1.0 - qv[g].real() >= -1e-9);
        }
        for (double t : taus) CHECK(std::abs(cert.q_polynomial()(t).real() - 1.0) < 1e-9);
        ComplexVector nonconst = cert.q;
        nonconst[0] = 0.0;
        CHECK(nonconst.norm() > 0.0);

        const CertificateReport rep = verify_certificate(cert, taus, di);
        CHECK(rep.all_passed());
        CHECK(rep.interpolation.residual <= 1e-9);
        CHECK(rep.sparse_sos.residual <= 1e-9);
        CHECK(rep.support.residual <= 1e-9);

        // The certificate is a feasible dual point.
        const DualFeasibilityReport dual = check_dual_feasibility(cert.q, cert.s(), i, di);
        CHECK(dual.stationarity <= 1e-10);
    }
}

TEST_CASE("single source with a two-element compression has one root")
{
    const std::vector<double> taus{0.3};
    const Certificate cert = construct_certificate(taus, IndexSet({0, 1}, 8), 8);
    const TrigPolynomial q = cert.q_polynomial();
    for (double t : uniform_grid(1000)) {
        if (circle_distance(t, 0.3) > 0.01) CHECK(1.0 - q(t).real() > 1e-4);
    }
    CHECK(1.0 - q(0.3).real() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("verification detects violated conditions")
{
    const std::vector<double> taus{0.1, 0.55};
    const IndexSet i({0, 1, 3}, 8);
    Certificate cert = construct_certificate(taus, i, 8);
    const IndexSet omega = difference_set(i);
    CHECK(verify_certificate(cert, taus, omega).all_passed());

    Certificate bumped = cert;
    bumped.q[6] += 1e-3;
    const CertificateReport bad = verify_certificate(bumped, taus, omega);
    CHECK_FALSE(bad.support.passed);

    const CertificateReport narrow = verify_certificate(cert, taus, IndexSet({0, 1, 2}, 8));
    CHECK_FALSE(narrow.support.passed);

    CHECK_THROWS_AS(verify_certificate(cert, taus, omega, 16), DomainError);
}

TEST_CASE("construct_certificate enforces its hypotheses")
{
    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS_AS(construct_certificate(two, IndexSet({0, 1}, 5), 5), HypothesisError);
    CHECK_THROWS_AS(construct_certificate(two, IndexSet({1, 2, 3}, 5), 5), HypothesisError);
    const std::vector<double> bad{1.2};
    CHECK_THROWS_AS(construct_certificate(bad, IndexSet({0, 1}, 5), 5), DomainError);
}

TEST_CASE("certify_recovery")
{
    std::mt19937_64 rng(111);
    const IndexSet j = cantor_array(4);
    const IndexSet omega = difference_set(j);
    for (int trial = 0; trial < 5; ++trial) {
        const auto taus = test::random_taus(rng, 8);
        const auto amps = test::random_amplitudes(rng, 8);
        CHECK(certify_recovery(taus, amps, j, omega, 28));
    }
    const auto sixteen = test::random_taus(rng, 16);
    const auto ones = std::vector<double>(16, 1.0);
    CHECK_FALSE(certify_recovery(sixteen, ones, j, omega, 28));
    const RecoveryCertification why = certify(sixteen, ones, j, omega, 28);
    CHECK(why.reason.find("p < M violated") != std::string::npos);

    const std::vector<double> t2{0.2, 0.6};
    const std::vector<double> a2{1.0, 1.0};
    CHECK_FALSE(certify_recovery(t2, a2, IndexSet({0, 2, 5}, 8), IndexSet({0, 2, 3}, 8), 8));
}
