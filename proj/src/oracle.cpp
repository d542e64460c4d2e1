#include "canm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "canm/error.hpp"
#include "canm/source_recovery.hpp"

namespace canm {

GridProblem GridProblem::uniform(const IndexSet& omega, const ComplexVector& target, std::size_t grid_size)
{
    const std::size_t n = omega.ambient();
    if (grid_size < 4 * n) throw DomainError("GridProblem: grid must hold at least 4N points");
    if (static_cast<std::size_t>(target.size()) != omega.size()) throw ShapeError("GridProblem: target length differs from |Omega|");
    GridProblem gp;
    gp.grid = uniform_grid(grid_size);
    gp.target = target;
    gp.omega = omega;
    gp.dictionary.resize(static_cast<Index>(omega.size()), static_cast<Index>(grid_size));
    for (std::size_t g = 0; g < grid_size; ++g) {
        for (std::size_t r = 0; r < omega.size(); ++r) {
            const double phase = kTwoPi * wrap_unit(static_cast<double>(omega[r]) * gp.grid[g]);
            gp.dictionary(static_cast<Index>(r), static_cast<Index>(g)) = Complex(std::cos(phase), std::sin(phase));
        }
    }
    return gp;
}

GridRecovery grid_recover(const GridProblem& problem, double tol, double support_ratio)
{
    GridRecovery out;
    const NnlsResult fit = complex_nnls(problem.dictionary, problem.target);
    out.coefficients = fit.x;
    out.residual = fit.residual_norm;
    out.iterations = fit.iterations;
    out.feasible = fit.residual_norm <= tol;
    out.objective = fit.x.sum();
    const double cmax = fit.x.size() > 0 ? fit.x.maxCoeff() : 0.0;
    for (Index g = 0; g < fit.x.size(); ++g) {
        if (fit.x[g] > 0.0 && fit.x[g] > support_ratio * cmax) out.support.push_back(static_cast<std::size_t>(g));
    }
    return out;
}

ComplexVector Instance::signal() const
{
    return synthesize(taus, amplitudes, static_cast<Index>(n));
}

ProblemSpec Instance::problem(bool compressed) const
{
    ProblemSpec spec;
    spec.n = n;
    spec.omega = omega;
    spec.observed = SelectionOperator(omega).apply(signal());
    if (compressed) spec.compression = compression;
    return spec;
}

bool CrossValidationReport::passed() const
{
    return solvers_converged && objectives_agree && supports_agree && (!certificate_available || certified);
}

namespace {

double nearest(double t, const std::vector<double>& set)
{
    double best = std::numeric_limits<double>::infinity();
    for (double s : set) best = std::min(best, circle_distance(t, s));
    return best;
}

} // namespace

CrossValidationReport cross_validate(const Instance& instance, std::size_t grid_size, const SolverConfig& config)
{
    CrossValidationReport rep;
    const ComplexVector x = instance.signal();
    for (double c : instance.amplitudes) rep.objective_truth += c;

    const SdpSolution identity = solve(instance.problem(false), config);
    const SdpSolution compressed = solve(instance.problem(true), config);
    rep.solvers_converged = identity.converged() && compressed.converged();
    rep.objective_identity = identity.objective;
    rep.objective_compressed = compressed.objective;
    if (!identity.converged()) rep.differences.push_back("identity program: " + to_string(identity.status));
    if (!compressed.converged()) rep.differences.push_back("compressed program: " + to_string(compressed.status));

    const GridProblem gp = GridProblem::uniform(instance.omega, SelectionOperator(instance.omega).apply(x), grid_size);
    const GridRecovery grid = grid_recover(gp, 1e-6 * std::max(1.0, gp.target.norm()));
    rep.objective_grid = grid.objective;
    rep.grid_feasible = grid.feasible;
    rep.grid_support = grid.support;
    rep.grid_cell = 1.0 / static_cast<double>(grid_size);

    const double objs[3] = {rep.objective_identity, rep.objective_compressed, rep.objective_grid};
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) rep.max_objective_gap = std::max(rep.max_objective_gap, std::abs(objs[a] - objs[b]));
    }
    rep.objectives_agree = rep.max_objective_gap <= 1e-3;
    if (!rep.objectives_agree) {
        std::ostringstream os;
        os << "objectives disagree: identity " << objs[0] << ", compressed " << objs[1] << ", grid " << objs[2];
        rep.differences.push_back(os.str());
    }

    try {
        rep.solver_taus = vandermonde_decompose(compressed.x_hat).taus;
    } catch (const NotPsdError& e) {
        rep.differences.push_back(std::string("atom extraction: ") + e.what());
    }
    std::vector<double> grid_taus;
    for (auto g : grid.support) grid_taus.push_back(gp.grid[g]);
    double dist = 0.0;
    for (double t : grid_taus) dist = std::max(dist, nearest(t, rep.solver_taus));
    for (double t : rep.solver_taus) dist = std::max(dist, nearest(t, grid_taus));
    rep.support_distance = dist;
    rep.supports_agree = !rep.solver_taus.empty() && !grid_taus.empty() && dist <= rep.grid_cell * (1.0 + 1e-9);
    if (!rep.supports_agree) {
        std::ostringstream os;
        os << "supports differ by " << dist << " (grid cell " << rep.grid_cell << ")";
        rep.differences.push_back(os.str());
    }

    const RecoveryCertification cert =
        certify(instance.taus, instance.amplitudes, instance.compression, instance.omega, instance.n);
    rep.certificate_available = cert.hypotheses.all_passed();
    rep.certified = cert.certified;
    if (!rep.certificate_available) {
        rep.differences.push_back("certificate unavailable: " + cert.reason);
    } else if (!rep.certified) {
        rep.differences.push_back("certificate rejected: " + cert.reason);
    }
    return rep;
}

} // namespace canm
