#include <doctest.h>

#include <Eigen/QR>

#include "canm/error.hpp"
#include "canm/linalg.hpp"
#include "support.hpp"

using namespace canm;
using canm::test::cis;

namespace {

double max_abs(const ComplexMatrix& m)
{
    return m.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("atom samples the complex exponential")
{
    CHECK(max_abs(atom(0.0, 4) - ComplexVector::Ones(4)) < 1e-15);
    ComplexVector quarter(4);
    quarter << 1.0, Complex(0, 1), -1.0, Complex(0, -1);
    CHECK(max_abs(atom(0.25, 4) - quarter) < 1e-15);
    ComplexVector half(3);
    half << 1.0, -1.0, 1.0;
    CHECK(max_abs(atom(0.5, 3) - half) < 1e-15);
    CHECK(atom(0.3, 1).size() == 1);
}

TEST_CASE("atom rejects out-of-range input")
{
    CHECK_THROWS_AS(atom(1.0, 4), DomainError);
    CHECK_THROWS_AS(atom(-0.1, 4), DomainError);
    CHECK_THROWS_AS(atom(0.1, 0), DomainError);
    CHECK_THROWS_AS(atom(std::nan(""), 4), DomainError);
    CHECK(max_abs(atom_unchecked(1.3, 5) - atom(0.3, 5)) < 1e-12);
}

TEST_CASE("toeplitz builds the Hermitian Toeplitz matrix")
{
    ComplexVector c(3);
    c << 2.5, 0.0, 0.0;
    CHECK(max_abs(toeplitz(c) - 2.5 * ComplexMatrix::Identity(3, 3)) < 1e-15);

    ComplexVector x(2);
    x << 2.0, 1.0;
    const HermitianMatrix t = toeplitz(x);
    ComplexMatrix expect(2, 2);
    expect << 2.0, 1.0, 1.0, 2.0;
    CHECK(max_abs(t - expect) < 1e-15);
    const EigenDecomposition e = hermitian_eig(t);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(5);
    const ComplexVector y = test::random_vector(rng, 6);
    const HermitianMatrix ty = toeplitz(y);
    for (Index r = 0; r < 6; ++r) {
        for (Index col = 0; col < 6; ++col) {
            const Complex want = r >= col ? (r == col ? Complex(y[0].real(), 0) : y[r - col]) : std::conj(y[col - r]);
            CHECK(std::abs(ty(r, col) - want) < 1e-15);
        }
    }
    CHECK(hermitian_defect(ty) == 0.0);
}

TEST_CASE("toeplitz of a positive atomic combination is PSD")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 4 + static_cast<Index>(rng() % 28);
        const auto taus = test::random_taus(rng, 1 + rng() % 6);
        const auto amps = test::random_amplitudes(rng, taus.size());
        const ComplexVector x = test::brute_signal(taus, amps, n);
        CHECK(hermitian_eig(toeplitz(x)).values.minCoeff() >= -1e-8 * x.norm());
        ComplexVector neg = x;
        neg[0] = -std::abs(neg[0]);
        CHECK(hermitian_eig(toeplitz(neg)).values.minCoeff() < 0.0);
    }
}

TEST_CASE("toeplitz_adjoint sums subdiagonals")
{
    CHECK(max_abs(toeplitz_adjoint(ComplexMatrix::Identity(3, 3)) - Eigen::Vector3cd(3, 0, 0)) < 1e-15);
    ComplexVector p(3);
    p << 1.0, -1.0, 0.0;
    p /= std::sqrt(2.0);
    CHECK(max_abs(toeplitz_adjoint(p * p.adjoint()) - Eigen::Vector3cd(1, -0.5, 0)) < 1e-15);
}

TEST_CASE("adjoint identity holds on random inputs")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 40);
        ComplexVector x = test::random_vector(rng, n);
        x[0] = x[0].real();
        const HermitianMatrix h = test::random_hermitian(rng, n);
        double lhs = 0.0;
        const HermitianMatrix t = toeplitz(x);
        for (Index r = 0; r < n; ++r) {
            for (Index c = 0; c < n; ++c) lhs += (std::conj(t(r, c)) * h(r, c)).real();
        }
        const ComplexVector adj = toeplitz_adjoint(h);
        double rhs = x[0].real() * adj[0].real();
        for (Index j = 1; j < n; ++j) rhs += 2.0 * (std::conj(x[j]) * adj[j]).real();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("K weights")
{
    ComplexVector q(4);
    q << 1.0, 2.0, Complex(0, 4), -6.0;
    const ComplexVector k = apply_k(q);
    CHECK(std::abs(k[0] - 1.0) < 1e-15);
    CHECK(std::abs(k[2] - Complex(0, 2)) < 1e-15);
    CHECK(max_abs(apply_k_inverse(k) - q) < 1e-15);
}

TEST_CASE("hermitian_eig")
{
    const EigenDecomposition id = hermitian_eig(ComplexMatrix::Identity(5, 5));
    CHECK((id.values.array() - 1.0).abs().maxCoeff() < 1e-14);

    const ComplexVector a = atom(0.37, 12);
    const EigenDecomposition r1 = hermitian_eig(a * a.adjoint());
    CHECK(r1.values[0] == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(r1.values.tail(11).cwiseAbs().maxCoeff() <= 1e-10 * 12.0);

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 64);
        const HermitianMatrix h = test::random_hermitian(rng, n);
        const EigenDecomposition e = hermitian_eig(h);
        const ComplexMatrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
        CHECK(max_abs(rebuilt - h) <= 1e-10 * std::max(1.0, max_abs(h)));
        CHECK(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(n, n)) <= 1e-10);
        for (Index k = 1; k < n; ++k) CHECK(e.values[k - 1] >= e.values[k]);
    }

    ComplexMatrix bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(hermitian_eig(bad), DomainError);
}

TEST_CASE("psd_project")
{
    CHECK(max_abs(psd_project(-ComplexMatrix::Identity(4, 4))) == 0.0);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -2.0;
    ComplexMatrix want = ComplexMatrix::Zero(2, 2);
    want(0, 0) = 1.0;
    CHECK(max_abs(psd_project(d) - want) < 1e-14);

    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 20);
        const ComplexMatrix b = test::random_matrix(rng, n, n);
        const HermitianMatrix psd = b * b.adjoint();
        CHECK(max_abs(psd_project(psd) - psd) <= 1e-10 * std::max(1.0, max_abs(psd)));

        const HermitianMatrix h = test::random_hermitian(rng, n);
        const HermitianMatrix p = psd_project(h);
        CHECK(max_abs(psd_project(p) - p) <= 1e-10 * std::max(1.0, max_abs(p)));
        CHECK(hermitian_eig(p).values.minCoeff() >= -1e-12 * std::max(1.0, max_abs(p)));

        // No sampled PSD candidate is closer in Frobenius norm.
        const double best = (p - h).norm();
        for (int c = 0; c < 100; ++c) {
            const ComplexMatrix g = test::random_matrix(rng, n, n) * 0.1;
            const HermitianMatrix candidate = psd_project(p + g * g.adjoint() - (g + g.adjoint()) * 0.05);
            CHECK((candidate - h).norm() >= best - 1e-10);
        }
    }
}

TEST_CASE("nullspace_vector")
{
    ComplexMatrix v(1, 2);
    v << 1.0, 1.0;
    const ComplexVector u = nullspace_vector(v);
    CHECK(std::abs(u[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(u[1] + 1.0 / std::sqrt(2.0)) < 1e-12);

    const ComplexVector z = nullspace_vector(ComplexMatrix::Zero(2, 4));
    CHECK(z.norm() == doctest::Approx(1.0));
    CHECK(std::abs(z[0].imag()) < 1e-15);

    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix r = test::random_matrix(rng, 3, 8);
        const ComplexVector k = nullspace_vector(r);
        CHECK(k.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((r * k).norm() / r.norm() <= 1e-10);
        Index first = 0;
        while (std::abs(k[first]) < 1e-14) ++first;
        CHECK(k[first].imag() == 0.0);
        CHECK(k[first].real() > 0.0);
    }
}

TEST_CASE("trigonometric polynomials")
{
    ComplexVector e0 = ComplexVector::Zero(5);
    e0[0] = 1.0;
    const TrigPolynomial c(e0);
    for (double t : uniform_grid(17)) CHECK(std::abs(c(t) - 1.0) < 1e-15);

    ComplexVector e1 = ComplexVector::Zero(3);
    e1[1] = 1.0;
    const TrigPolynomial neg(e1, ExponentSign::Negative);
    const TrigPolynomial pos(e1, ExponentSign::Positive);
    for (double t : {0.0, 0.1, 0.37, 0.9}) {
        CHECK(std::abs(neg(t) - cis(-kTwoPi * t)) < 1e-14);
        CHECK(std::abs(pos(t) - cis(kTwoPi * t)) < 1e-14);
    }

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 40);
        const ComplexVector p = test::random_vector(rng, n);
        const TrigPolynomial poly(p);
        const auto grid = uniform_grid(static_cast<std::size_t>(2 * n + rng() % 7));
        const ComplexVector vals = poly.evaluate(grid);
        CHECK(vals.squaredNorm() / static_cast<double>(grid.size()) ==
              doctest::Approx(p.squaredNorm()).epsilon(1e-10));
        CHECK(std::abs(poly(0.3) - poly(1.3)) < 1e-10 * (1.0 + p.norm()));
        Complex direct = 0.0;
        for (Index k = 0; k < n; ++k) direct += p[k] * cis(-kTwoPi * static_cast<double>(k) * 0.3);
        CHECK(std::abs(direct - poly(0.3)) < 1e-10 * (1.0 + p.norm()));
    }
}

TEST_CASE("real_jet derivatives match finite differences")
{
    std::mt19937_64 rng(71);
    const TrigPolynomial poly(test::random_vector(rng, 9));
    const double t = 0.41;
    const double h = 1e-5;
    const auto jet = poly.real_jet(t);
    CHECK(jet.value == doctest::Approx(poly(t).real()));
    CHECK(jet.d1 == doctest::Approx((poly(t + h).real() - poly(t - h).real()) / (2 * h)).epsilon(1e-6));
    CHECK(jet.d2 == doctest::Approx((poly(t + h).real() - 2 * poly(t).real() + poly(t - h).real()) / (h * h)).epsilon(1e-4));
}

TEST_CASE("circle helpers")
{
    CHECK(circle_distance(0.02, 0.98) == doctest::Approx(0.04));
    CHECK(circle_distance(0.25, 0.75) == doctest::Approx(0.5));
    CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
    CHECK(wrap_unit(3.5) == doctest::Approx(0.5));
    const auto g = uniform_grid(4);
    CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75});
}

TEST_CASE("nnls matches a brute-force active-set enumeration")
{
    std::mt19937_64 rng(81);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
        const Index rows = 3 + static_cast<Index>(rng() % 6);
        const Index cols = 1 + static_cast<Index>(rng() % 6);
        RealMatrix a(rows, cols);
        RealVector b(rows);
        for (Index r = 0; r < rows; ++r) {
            b[r] = gauss(rng);
            for (Index c = 0; c < cols; ++c) a(r, c) = gauss(rng);
        }
        double best = b.norm();
        for (unsigned mask = 1; mask < (1u << cols); ++mask) {
            std::vector<Index> sel;
            for (Index c = 0; c < cols; ++c) {
                if (mask & (1u << c)) sel.push_back(c);
            }
            RealMatrix sub(rows, static_cast<Index>(sel.size()));
            for (std::size_t k = 0; k < sel.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(sel[k]);
            const RealVector z = sub.colPivHouseholderQr().solve(b);
            if (z.minCoeff() >= 0.0) best = std::min(best, (sub * z - b).norm());
        }
        const NnlsResult res = nnls(a, b);
        CHECK(res.x.minCoeff() >= 0.0);
        CHECK(res.residual_norm == doctest::Approx((a * res.x - b).norm()).epsilon(1e-10));
        CHECK(res.residual_norm <= best + 1e-9);
    }
}

TEST_CASE("complex_nnls recovers nonnegative coefficients")
{
    std::mt19937_64 rng(91);
    const ComplexMatrix a = test::random_matrix(rng, 12, 5);
    RealVector c(5);
    c << 1.0, 0.0, 2.5, 0.0, 0.3;
    const NnlsResult res = complex_nnls(a, a * c.cast<Complex>());
    CHECK((res.x - c).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(res.residual_norm < 1e-10);

    const NnlsResult zero = complex_nnls(a, ComplexVector::Zero(12));
    CHECK(zero.x.cwiseAbs().maxCoeff() == 0.0);
}
