#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canm/certificate.hpp"
#include "canm/geometry.hpp"
#include "canm/linalg.hpp"
#include "canm/sdp_solver.hpp"

namespace canm {

/// Nonnegative recovery restricted to a uniform frequency grid.
struct GridProblem {
    std::vector<double> grid; ///< G points in [0, 1)
    ComplexMatrix dictionary; ///< |Ω| x G, column g is P_Ω a(grid[g])
    ComplexVector target;     ///< x_Ω
    IndexSet omega;

    /// Throws DomainError when G < 4N.
    static GridProblem uniform(const IndexSet& omega, const ComplexVector& target, std::size_t grid_size);
};

struct GridRecovery {
    RealVector coefficients;          ///< length G, nonnegative
    std::vector<std::size_t> support; ///< grid indices holding mass
    double residual = 0.0;            ///< ‖V c − x_Ω‖
    bool feasible = false;            ///< residual <= tol
    double objective = 0.0;           ///< Σ c
    int iterations = 0;
};

/// Active-set NNLS on the grid dictionary. Coefficients below
/// support_ratio · max c are not counted in the support.
GridRecovery grid_recover(const GridProblem& problem, double tol, double support_ratio = 1e-3);

/// A ground-truth instance for cross validation.
struct Instance {
    std::size_t n = 0;
    std::vector<double> taus;
    std::vector<double> amplitudes;
    IndexSet compression;
    IndexSet omega;

    ComplexVector signal() const;
    ProblemSpec problem(bool compressed) const;
};

struct CrossValidationReport {
    double objective_identity = 0.0;
    double objective_compressed = 0.0;
    double objective_grid = 0.0;
    double objective_truth = 0.0;
    double max_objective_gap = 0.0;   ///< largest pairwise gap among the three methods
    double support_distance = 0.0;    ///< worst circle distance between grid support and solver atoms
    double grid_cell = 0.0;           ///< 1 / G
    bool solvers_converged = false;
    bool certificate_available = false;
    bool certified = false;
    bool grid_feasible = false;
    bool objectives_agree = false;
    bool supports_agree = false;
    std::vector<double> solver_taus; ///< atoms read off the compressed solution
    std::vector<std::size_t> grid_support;
    std::vector<std::string> differences; ///< disagreements and notes, empty when all three agree

    bool passed() const;
};

/// Solves the instance with the identity and the compressed program, with the
/// grid oracle and with the certificate, and reports how they agree.
CrossValidationReport cross_validate(const Instance& instance, std::size_t grid_size, const SolverConfig& config = {});

} // namespace canm
