#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "canm/geometry.hpp"
#include "canm/linalg.hpp"

namespace canm {

struct CertificateCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0; ///< worst-case value the check compared against its tolerance
};

/// Outcome of the four dual-certificate conditions.
struct CertificateReport {
    CertificateCheck non_constant;  ///< Q is not identically 1
    CertificateCheck interpolation; ///< Re Q(τ_k) = 1 at every source
    CertificateCheck support;       ///< q vanishes outside Ω
    CertificateCheck sparse_sos;    ///< 1 − Re Q = |P|² ≥ 0 on the grid
    double min_gap = 0.0;           ///< min over the grid of 1 − Re Q
    std::size_t grid_size = 0;

    bool all_passed() const;
    std::vector<CertificateCheck> checks() const;
};

/// Dual certificate built from a nullspace vector of V = A^H P_I^H.
struct Certificate {
    ComplexVector u; ///< length M, unit norm, V u = 0
    ComplexVector p; ///< P_I^H u, supported on I
    ComplexVector q; ///< K^{-1}(e_0 − T*(p p^H)), supported on ∂I
    IndexSet compression;
    std::size_t grid_size = 0;
    CertificateReport report;

    TrigPolynomial q_polynomial() const { return TrigPolynomial(q, ExponentSign::Negative); }
    TrigPolynomial p_polynomial() const { return TrigPolynomial(p, ExponentSign::Negative); }
    /// The dual matrix S = u u^H.
    HermitianMatrix s() const { return u * u.adjoint(); }
};

/// Throws HypothesisError when p >= |I| or 0 ∉ I, DomainError for taus outside [0, 1).
Certificate construct_certificate(std::span<const double> taus, const IndexSet& compression, std::size_t n);

/// Numerically checks the four conditions on a uniform grid of `grid_size`
/// points plus the sources themselves; grid_size 0 selects 16N. Throws
/// DomainError if grid_size is below 4N.
CertificateReport verify_certificate(const Certificate& cert, std::span<const double> taus, const IndexSet& omega,
                                     std::size_t grid_size = 0);

struct RecoveryCertification {
    bool certified = false;
    CompressionReport hypotheses;
    std::optional<Certificate> certificate;
    std::string reason; ///< empty when certified
};

/// Runs the hypothesis checks, then construction and verification.
RecoveryCertification certify(std::span<const double> taus, std::span<const double> amplitudes,
                              const IndexSet& compression, const IndexSet& omega, std::size_t n,
                              std::size_t grid_size = 0);

bool certify_recovery(std::span<const double> taus, std::span<const double> amplitudes,
                      const IndexSet& compression, const IndexSet& omega, std::size_t n);

} // namespace canm
