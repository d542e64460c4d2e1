#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canm/geometry.hpp"
#include "canm/linalg.hpp"

namespace canm {

enum class ProgramMode {
    ExactEquality, ///< min Re(x_0)  s.t.  x_Ω = observed,  P_I T(x) P_I^H ⪰ 0
    Denoise,       ///< min ½‖x_Ω − y‖² + λ Re(x_0)  s.t.  P_I T(x) P_I^H ⪰ 0
};

/// One instance of the positive atomic norm program, compressed or not.
struct ProblemSpec {
    std::size_t n = 0;
    IndexSet omega;
    /// Samples on Ω in increasing index order.
    ComplexVector observed;
    /// Compression set I; empty optional means the identity (uncompressed program).
    std::optional<IndexSet> compression;
    ProgramMode mode = ProgramMode::ExactEquality;
    double lambda = 0.0;

    /// Throws DomainError / ShapeError when the fields are inconsistent.
    void validate() const;
    /// I, or {0, ..., N-1} for the identity compression.
    IndexSet compression_set() const;
    bool is_identity() const { return !compression.has_value(); }
};

struct SolverConfig {
    double rho = 1.0;
    int max_iters = 50000;
    double eps_abs = 1e-7;
    double eps_rel = 1e-6;
    double over_relaxation = 1.5;
    bool adaptive_rho = true;
    bool record_history = false;
    /// Relative eigenvalue floor separating the range of Ẑ from its kernel
    /// when building the complementary dual in exact mode.
    double dual_rank_tol = 1e-12;
    /// Dual-polynomial threshold for locating atoms when completing x.
    double completion_threshold_exact = 1.0 - 1e-6;
    double completion_threshold_denoise = 1.0 - 1e-2;

    void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, Infeasible, CompletionFailed };
std::string to_string(SolveStatus status);

enum class DualSource {
    Multiplier,    ///< ADMM multiplier of the coupling constraint
    Complementary, ///< projector onto ker(Ẑ), exact mode only
    Trivial,       ///< (q, S) = (e_0, 0)
};
std::string to_string(DualSource source);

struct ResidualSample {
    int iteration;
    double primal;
    double dual;
    double rho;
};

struct SdpSolution {
    ComplexVector x_hat;   ///< length N
    ComplexVector q_hat;   ///< length N, zero outside Ω
    HermitianMatrix s_hat; ///< M x M, PSD
    IndexSet compression;  ///< the I used (full set for identity)
    IndexSet omega;
    ProgramMode mode = ProgramMode::ExactEquality;
    double lambda = 0.0;

    double objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    /// ‖(K^{-1} T*(P^H S P))_{Ω^c}‖ before q was truncated to Ω.
    double q_off_support = 0.0;
    int iterations = 0;
    double rho = 0.0;
    double wall_time_seconds = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    DualSource dual_source = DualSource::Multiplier;

    /// Coordinates untouched by both the data and the LMI, filled by atomic completion.
    IndexSet free_coordinates;
    double completion_residual = 0.0;

    std::vector<ResidualSample> history;

    bool converged() const { return status == SolveStatus::Converged; }
    double duality_gap() const { return objective - dual_objective; }
};

/// Solves the exact or denoising program by ADMM on the splitting
/// Z = P_I T(x) P_I^H, Z ⪰ 0.
SdpSolution solve(const ProblemSpec& spec, const SolverConfig& config = {});

struct DualPolynomial {
    TrigPolynomial polynomial; ///< Q(τ) = a(τ)^H q̂
    bool from_converged = true;
};

DualPolynomial dual_polynomial(const SdpSolution& solution);

struct DualFeasibilityReport {
    double stationarity = 0.0; ///< ‖T*(P_I^H S P_I) + K q − e_0‖
    double min_eig_s = 0.0;
    double q_off_support = 0.0; ///< ‖q_{Ω^c}‖
    bool passed(double tol) const;
};

/// Evaluates the constraints of the dual program for an arbitrary (q, S).
DualFeasibilityReport check_dual_feasibility(const ComplexVector& q, const HermitianMatrix& s,
                                             const IndexSet& compression, const IndexSet& omega);
DualFeasibilityReport check_dual_feasibility(const SdpSolution& solution, const ProblemSpec& spec);

/// T*(P_I^H S P_I) computed without forming the N x N lift.
ComplexVector compressed_toeplitz_adjoint(const HermitianMatrix& s, const IndexSet& compression);

} // namespace canm
