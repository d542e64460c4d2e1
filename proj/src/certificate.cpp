#include "canm/certificate.hpp"

#include <algorithm>
#include <cmath>

#include "canm/error.hpp"

namespace canm {

namespace {

constexpr double kConditionTol = 1e-9;

} // namespace

bool CertificateReport::all_passed() const
{
    return non_constant.passed && interpolation.passed && support.passed && sparse_sos.passed;
}

std::vector<CertificateCheck> CertificateReport::checks() const
{
    return {non_constant, interpolation, support, sparse_sos};
}

Certificate construct_certificate(std::span<const double> taus, const IndexSet& compression, std::size_t n)
{
    if (compression.ambient() != n) throw ShapeError("construct_certificate: compression ambient does not match N");
    if (!compression.contains(0)) throw HypothesisError("construct_certificate: 0 must belong to I");
    if (taus.size() >= compression.size()) {
        throw HypothesisError("construct_certificate: p < M violated (p = " + std::to_string(taus.size()) +
                              ", M = " + std::to_string(compression.size()) + ")");
    }
    for (double t : taus) {
        if (!(t >= 0.0 && t < 1.0)) throw DomainError("construct_certificate: tau outside [0, 1)");
    }

    // V = A^H P_I^H, V[k, m] = e^{-i2π i_m τ_k}
    const auto p_count = static_cast<Index>(taus.size());
    const auto m = static_cast<Index>(compression.size());
    ComplexMatrix v(p_count, m);
    for (Index k = 0; k < p_count; ++k) {
        for (Index c = 0; c < m; ++c) {
            const double phase = -kTwoPi * wrap_unit(static_cast<double>(compression[c]) * taus[k]);
            v(k, c) = Complex(std::cos(phase), std::sin(phase));
        }
    }

    Certificate cert;
    cert.compression = compression;
    cert.u = nullspace_vector(v);
    cert.p = SelectionOperator(compression).embed(cert.u);

    // e_0 − K q = T*(p p^H). T*(pp^H)_j = Σ_l p_{j+l} conj(p_l) only involves
    // lags of ∂I, so q is assembled on exact zeros elsewhere.
    ComplexVector tstar = ComplexVector::Zero(static_cast<Index>(n));
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b <= a; ++b) {
            tstar[compression[a] - compression[b]] += cert.u[a] * std::conj(cert.u[b]);
        }
    }
    ComplexVector rhs = -tstar;
    rhs[0] += 1.0;
    cert.q = apply_k_inverse(rhs);
    cert.q[0] = Complex(cert.q[0].real(), 0.0);
    return cert;
}

CertificateReport verify_certificate(const Certificate& cert, std::span<const double> taus, const IndexSet& omega,
                                     std::size_t grid_size)
{
    const auto n = static_cast<std::size_t>(cert.q.size());
    if (omega.ambient() != n) throw ShapeError("verify_certificate: Omega ambient does not match N");
    if (grid_size == 0) grid_size = 16 * n;
    if (grid_size < 4 * n) throw DomainError("verify_certificate: grid must hold at least 4N points");

    CertificateReport report;
    report.grid_size = grid_size;

    ComplexVector e0 = ComplexVector::Zero(static_cast<Index>(n));
    e0[0] = 1.0;
    const double distance = (cert.q - e0).norm();
    report.non_constant = {"Q is not identically 1", distance > 1e-8, distance};

    const TrigPolynomial q_poly = cert.q_polynomial();
    const TrigPolynomial p_poly = cert.p_polynomial();
    double worst_root = 0.0;
    for (double t : taus) worst_root = std::max(worst_root, std::abs(1.0 - q_poly(t).real()));
    report.interpolation = {"Re Q = 1 at the sources", worst_root <= kConditionTol, worst_root};

    double off = 0.0;
    for (Index j = 0; j < cert.q.size(); ++j) {
        if (!omega.contains(static_cast<IndexSet::value_type>(j))) off = std::max(off, std::abs(cert.q[j]));
    }
    report.support = {"q vanishes outside Omega", off == 0.0, off};

    std::vector<double> grid = uniform_grid(grid_size);
    grid.insert(grid.end(), taus.begin(), taus.end());
    const ComplexVector qv = q_poly.evaluate(grid);
    const ComplexVector pv = p_poly.evaluate(grid);
    double sos_gap = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (Index g = 0; g < qv.size(); ++g) {
        const double gap = 1.0 - qv[g].real();
        sos_gap = std::max(sos_gap, std::abs(gap - std::norm(pv[g])));
        min_gap = std::min(min_gap, gap);
    }
    report.min_gap = min_gap;
    report.sparse_sos = {"1 - Re Q = |P|^2 >= 0", sos_gap <= kConditionTol && min_gap >= -kConditionTol,
                         std::max(sos_gap, std::max(0.0, -min_gap))};
    return report;
}

RecoveryCertification certify(std::span<const double> taus, std::span<const double> amplitudes,
                              const IndexSet& compression, const IndexSet& omega, std::size_t n,
                              std::size_t grid_size)
{
    RecoveryCertification out;
    if (taus.size() != amplitudes.size()) throw ShapeError("certify: taus and amplitudes differ in length");
    for (double c : amplitudes) {
        if (!(c > 0.0)) throw DomainError("certify: amplitudes must be positive");
    }
    out.hypotheses = validate_compression(compression, omega, taus.size());
    if (!out.hypotheses.all_passed()) {
        out.reason = out.hypotheses.failure_summary();
        return out;
    }
    Certificate cert = construct_certificate(taus, compression, n);
    cert.grid_size = grid_size == 0 ? 16 * n : grid_size;
    cert.report = verify_certificate(cert, taus, omega, cert.grid_size);
    out.certified = cert.report.all_passed();
    if (!out.certified) {
        std::string why;
        for (const auto& c : cert.report.checks()) {
            if (!c.passed) why += (why.empty() ? "" : "; ") + c.name + " failed";
        }
        out.reason = why;
    }
    out.certificate = std::move(cert);
    return out;
}

bool certify_recovery(std::span<const double> taus, std::span<const double> amplitudes,
                      const IndexSet& compression, const IndexSet& omega, std::size_t n)
{
    return certify(taus, amplitudes, compression, omega, n).certified;
}

} // namespace canm
