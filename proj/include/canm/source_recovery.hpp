#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "canm/geometry.hpp"
#include "canm/linalg.hpp"

namespace canm {

/// Ground-truth point sources: locations τ_k in [0, 1), positive weights and
/// the aperture N of the signal they generate.
struct SourceModel {
    std::vector<double> taus;
    std::vector<double> powers;
    std::size_t aperture = 0;

    /// Throws DomainError on nonpositive weights, duplicate or out-of-range taus.
    void validate() const;
    std::size_t count() const { return taus.size(); }
    /// x = Σ_k powers_k · a(τ_k) of length `aperture`.
    ComplexVector signal() const;
    double total_power() const;
};

enum class ExtractionMethod { PeakPicking, Vandermonde, AtomicFit };

struct SourceEstimate {
    std::vector<double> taus;       ///< strictly increasing, in [0, 1)
    std::vector<double> amplitudes; ///< nonnegative, aligned with taus
    ExtractionMethod method = ExtractionMethod::Vandermonde;
    double residual = 0.0;
    /// Set when an unconstrained fit wanted a negative amplitude that NNLS clamped.
    bool clamped = false;

    std::size_t count() const { return taus.size(); }
};

/// Local maxima of Re Q on a uniform grid, refined to sub-grid accuracy, whose
/// refined value reaches `threshold`. Returned sorted in [0, 1).
std::vector<double> peaks_of_dual(const TrigPolynomial& dual, std::size_t grid_size, double threshold);

/// The `count` highest refined local maxima of Re Q, sorted in [0, 1).
std::vector<double> strongest_peaks(const TrigPolynomial& dual, std::size_t grid_size, std::size_t count);

/// Atomic decomposition of x through the range space of T(x).
///
/// The numerical rank r counts eigenvalues above rank_tol·λ_max; frequencies
/// come from the shift invariance of the top-r eigenvectors, amplitudes from
/// nonnegative least squares. Throws NotPsdError when T(x) has an eigenvalue
/// below −rank_tol·λ_max.
SourceEstimate vandermonde_decompose(const ComplexVector& x_hat, double rank_tol = 1e-8);

struct AtomicFitOptions {
    int max_iterations = 2000;
    /// Atoms whose amplitude drops below this fraction of the largest are discarded.
    double prune_ratio = 1e-9;
};

/// Fits Σ c_k a(τ_k) (c_k >= 0) to `values` on the coordinates `known`,
/// starting from candidate locations: NNLS picks the support, then a damped
/// Gauss-Newton pass polishes locations and amplitudes jointly.
SourceEstimate fit_atoms(std::span<const double> candidates, const ComplexVector& values,
                         const IndexSet& known, const AtomicFitOptions& options = {});

/// Σ_k c_k a(τ_k) of length n.
ComplexVector synthesize(std::span<const double> taus, std::span<const double> amplitudes, Index n);

struct SourceMatch {
    std::size_t truth_index;
    std::size_t estimate_index;
    double error; ///< circle distance
};

struct MatchReport {
    std::vector<SourceMatch> matches;
    std::vector<std::size_t> missed;   ///< truth indices without an estimate
    std::vector<std::size_t> spurious; ///< estimate indices without a truth
    double max_error = 0.0;
    double median_error = 0.0;
    bool all_within(double tolerance) const;
};

/// Minimum-cost assignment under the circle metric. Pairs further apart than
/// `max_distance` are reported as missed and spurious.
MatchReport match_sources(std::span<const double> estimate, std::span<const double> truth,
                          double max_distance = std::numeric_limits<double>::infinity());
MatchReport match_sources(const SourceEstimate& estimate, const SourceModel& truth,
                          double max_distance = std::numeric_limits<double>::infinity());

} // namespace canm
