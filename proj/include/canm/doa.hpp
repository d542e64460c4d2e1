#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canm/geometry.hpp"
#include "canm/sdp_solver.hpp"
#include "canm/source_recovery.hpp"

namespace canm {

/// L snapshots of a sparse array, one column per time instant.
struct SnapshotBatch {
    ComplexMatrix snapshots; ///< |J| x L
    double noise_variance = 0.0;
    std::uint64_t seed = 0;

    std::size_t length() const { return static_cast<std::size_t>(snapshots.cols()); }
};

/// Incoherent circular complex Gaussian sources (variance η_k² each) plus
/// white circular Gaussian noise of variance σ² per sensor. Deterministic in `seed`.
SnapshotBatch simulate_snapshots(const SourceModel& model, const IndexSet& array, std::size_t snapshots,
                                 double sigma2, std::uint64_t seed);

/// (1/L) Σ u_ℓ u_ℓ^H
HermitianMatrix empirical_covariance(const SnapshotBatch& batch);

/// P_J Σ* P_J^H + σ² I with Σ* = Σ_k η_k² a(τ_k) a(τ_k)^H.
HermitianMatrix exact_covariance(const SourceModel& model, const IndexSet& array, double sigma2);

/// Lag-domain samples y_d, d ∈ ∂J, read off a sensor covariance.
struct CoarrayObservation {
    IndexSet omega;                  ///< ∂J
    ComplexVector y;                 ///< aligned with omega
    std::vector<std::size_t> weights; ///< sensor pairs averaged per lag
};

/// Subtracts σ² from the diagonal, then averages every sensor pair sharing a lag.
CoarrayObservation coarray_average(const HermitianMatrix& sigma, const IndexSet& array, double sigma2);

/// σ² such that Σ η_k² / σ² equals 10^{snr_db / 10}.
double noise_variance_for_snr(const SourceModel& model, double snr_db);
double snr_db_for(const SourceModel& model, double sigma2);

/// σ · sqrt(|Ω| log N / L), the default denoiser weight.
double default_lambda(double sigma2, std::size_t omega_size, std::size_t n, std::size_t snapshots);

/// How run_doa picks λ when none is given.
enum class LambdaRule {
    NoiseFloor,      ///< default_lambda with the known σ²
    CovarianceScale, ///< σ replaced by the mean sensor power tr(Σ_J)/|J|, the entry scale of the sampling error
};
std::string to_string(LambdaRule rule);

struct DoaConfig {
    std::size_t snapshots = 100;
    double snr_db = -5.0;
    std::optional<double> lambda;
    LambdaRule lambda_rule = LambdaRule::NoiseFloor;
    bool compress = true; ///< M = P_J when true, identity otherwise
    SolverConfig solver;
    std::size_t grid_size = 0; ///< 0 selects 16N
    double peak_threshold = 1.0 - 1e-2;
    /// Keep the strongest `peak_count` maxima instead of thresholding.
    std::optional<std::size_t> peak_count;
    std::uint64_t seed = 1;
    /// Feed the exact covariance (L → ∞) instead of simulated snapshots.
    bool exact_covariance = false;
};

struct DoaResult {
    SourceEstimate estimate;
    SdpSolution solution;
    ProblemSpec problem;
    CoarrayObservation observation;
    double sigma2 = 0.0;
    double snr_db = 0.0;
    double lambda = 0.0;
    std::size_t grid_size = 0;
    double peak_threshold = 0.0;
    std::optional<std::size_t> peak_count;
    LambdaRule lambda_rule = LambdaRule::NoiseFloor;
    /// Exact-recovery hypotheses hold for (I = J, Ω = ∂J, p).
    bool guaranteed = false;
    std::vector<double> dual_grid;
    RealVector dual_values; ///< Re Q on dual_grid
};

/// simulate → covariance → co-array → denoising program → dual-polynomial peaks.
DoaResult run_doa(const SourceModel& model, const IndexSet& array, const DoaConfig& config);

} // namespace canm
