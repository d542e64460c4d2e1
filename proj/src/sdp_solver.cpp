#include "canm/sdp_solver.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "canm/error.hpp"
#include "canm/source_recovery.hpp"

namespace canm {

void ProblemSpec::validate() const
{
    if (n < 1) throw DomainError("ProblemSpec: N must be positive");
    if (omega.ambient() != n) throw ShapeError("ProblemSpec: Omega ambient does not match N");
    if (static_cast<std::size_t>(observed.size()) != omega.size()) {
        throw ShapeError("ProblemSpec: observed length " + std::to_string(observed.size()) +
                         " does not match |Omega| = " + std::to_string(omega.size()));
    }
    if (!observed.allFinite()) throw DomainError("ProblemSpec: observations must be finite");
    if (compression) {
        if (compression->ambient() != n) throw ShapeError("ProblemSpec: compression ambient does not match N");
        if (!compression->contains(0)) throw DomainError("ProblemSpec: compression set must contain 0");
    }
    if (mode == ProgramMode::Denoise && !(lambda >= 0.0 && std::isfinite(lambda))) {
        throw DomainError("ProblemSpec: lambda must be a nonnegative finite number");
    }
}

IndexSet ProblemSpec::compression_set() const
{
    return compression ? *compression : IndexSet::full(n);
}

void SolverConfig::validate() const
{
    if (!(rho > 0.0)) throw DomainError("SolverConfig: rho must be positive");
    if (max_iters < 1) throw DomainError("SolverConfig: max_iters must be positive");
    if (!(eps_abs > 0.0 && eps_abs <= 1e-3)) throw DomainError("SolverConfig: eps_abs must lie in (0, 1e-3]");
    if (!(eps_rel > 0.0 && eps_rel <= 1e-3)) throw DomainError("SolverConfig: eps_rel must lie in (0, 1e-3]");
    if (!(over_relaxation >= 1.0 && over_relaxation <= 1.8)) {
        throw DomainError("SolverConfig: over_relaxation must lie in [1, 1.8]");
    }
    if (!(dual_rank_tol > 0.0 && dual_rank_tol < 1.0)) throw DomainError("SolverConfig: dual_rank_tol must lie in (0, 1)");
}

std::string to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::CompletionFailed: return "completion_failed";
    }
    return "unknown";
}

std::string to_string(DualSource source)
{
    switch (source) {
    case DualSource::Multiplier: return "multiplier";
    case DualSource::Complementary: return "complementary";
    case DualSource::Trivial: return "trivial";
    }
    return "unknown";
}

namespace {

// Which entries of Z = P_I T(x) P_I^H carry which lag of x.
class LagStructure {
public:
    LagStructure(const IndexSet& compression, std::size_t n)
        : set_(compression), n_(n), pairs_(n)
    {
        const auto m = static_cast<Index>(set_.size());
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < a; ++b) pairs_[set_[a] - set_[b]].push_back({a, b});
        }
        lags_ = difference_set(set_);
    }

    Index m() const { return static_cast<Index>(set_.size()); }
    const IndexSet& lags() const { return lags_; }
    std::size_t multiplicity(std::size_t lag) const
    {
        return lag == 0 ? set_.size() : pairs_[lag].size();
    }

    HermitianMatrix lift(const ComplexVector& x) const
    {
        HermitianMatrix z(m(), m());
        for (Index a = 0; a < m(); ++a) z(a, a) = Complex(x[0].real(), 0.0);
        for (std::size_t d = 1; d < n_; ++d) {
            for (const auto& [a, b] : pairs_[d]) {
                z(a, b) = x[static_cast<Index>(d)];
                z(b, a) = std::conj(x[static_cast<Index>(d)]);
            }
        }
        return z;
    }

    /// Sum over the lower-triangle entries of each lag (the trace for lag 0).
    ComplexVector lag_sums(const ComplexMatrix& w) const
    {
        ComplexVector s = ComplexVector::Zero(static_cast<Index>(n_));
        s[0] = w.diagonal().sum();
        for (std::size_t d = 1; d < n_; ++d) {
            for (const auto& [a, b] : pairs_[d]) s[static_cast<Index>(d)] += w(a, b);
        }
        return s;
    }

private:
    IndexSet set_;
    std::size_t n_;
    std::vector<std::vector<std::pair<Index, Index>>> pairs_;
    IndexSet lags_;
};

struct Split {
    HermitianMatrix positive;
    HermitianMatrix negative;
};

Split split_psd(const HermitianMatrix& v)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(v);
    const RealVector lam = es.eigenvalues();
    const ComplexMatrix& vec = es.eigenvectors();
    Split out;
    out.positive = vec * lam.cwiseMax(0.0).asDiagonal() * vec.adjoint();
    out.negative = vec * lam.cwiseMin(0.0).asDiagonal() * vec.adjoint();
    return out;
}

ComplexVector restrict_to(const ComplexVector& q, const IndexSet& omega, double* removed_norm)
{
    ComplexVector out = ComplexVector::Zero(q.size());
    double off = 0.0;
    for (Index j = 0; j < q.size(); ++j) {
        if (omega.contains(static_cast<IndexSet::value_type>(j))) {
            out[j] = q[j];
        } else {
            off += std::norm(q[j]);
        }
    }
    if (removed_norm) *removed_norm = std::sqrt(off);
    return out;
}

// q = e_0 − K^{-1} T*(P^H S P), the dual vector that pairs with S through stationarity.
ComplexVector stationary_q(const HermitianMatrix& s, const IndexSet& compression)
{
    ComplexVector q = -apply_k_inverse(compressed_toeplitz_adjoint(s, compression));
    q[0] += 1.0;
    return q;
}

struct Completion {
    SourceEstimate fit;
    bool identifiable = true;
};

ComplexVector known_atom(double tau, const IndexSet& known)
{
    return SelectionOperator(known).apply(atom_unchecked(tau, static_cast<Index>(known.ambient())));
}

// Any optimal atomic decomposition lives on the root set of the dual
// polynomial. Given a representation supported on the first `support` entries
// of `roots`, it is the only nonnegative one iff its atoms are independent on
// `known` and no null direction of the root dictionary is nonnegative on the
// remaining roots. By Gordan's alternative the latter holds iff the null-space
// rows B of those roots have full column rank and B^T y = 0 for some y > 0,
// which NNLS decides through min ||B^T (1 + w)||, w >= 0.
bool unique_on_roots(const std::vector<double>& roots, std::size_t support, const IndexSet& known)
{
    if (roots.empty()) return true;
    const auto rows = static_cast<Index>(known.size());
    const auto cols = static_cast<Index>(roots.size());
    RealMatrix a(2 * rows, cols);
    for (Index k = 0; k < cols; ++k) {
        const ComplexVector col = known_atom(roots[static_cast<std::size_t>(k)], known);
        a.col(k).head(rows) = col.real();
        a.col(k).tail(rows) = col.imag();
    }
    const auto s = static_cast<Index>(support);
    if (s > 0) {
        const RealVector sv = Eigen::JacobiSVD<RealMatrix>(a.leftCols(s)).singularValues();
        if (sv[sv.size() - 1] <= 1e-8 * sv[0]) return false;
    }
    if (s == cols) return true;

    const Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
    const RealVector sv = svd.singularValues();
    const double cutoff = 1e-9 * (sv.size() > 0 ? sv[0] : 1.0);
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > cutoff) ++rank;
    const Index nullity = cols - rank;
    if (nullity == 0) return true;

    const RealMatrix b = svd.matrixV().rightCols(nullity).bottomRows(cols - s);
    const RealVector bsv = Eigen::JacobiSVD<RealMatrix>(b).singularValues();
    if (b.rows() < nullity || bsv[bsv.size() - 1] <= 1e-8 * std::max(1.0, bsv[0])) return false;
    const RealVector shift = b.transpose() * RealVector::Ones(b.rows());
    const NnlsResult fit = nnls(b.transpose(), -shift);
    return fit.residual_norm <= 1e-9 * std::max(1.0, shift.norm());
}

// Fits nonnegative atoms to x on `known`, seeded by the peaks of the dual
// polynomial. Roots that merged into one peak are recovered by splitting fitted
// atoms into close pairs. The fit is reported
// identifiable when no other nonnegative combination on the root set of Q
// reproduces the data.
Completion complete(const TrigPolynomial& q_poly, const ComplexVector& x, const IndexSet& known, double threshold,
                    std::size_t max_extra)
{
    const std::size_t n = known.ambient();
    const ComplexVector target = SelectionOperator(known).apply(x);
    const double tol = 1e-11 * std::max(1.0, target.norm());

    Completion out;
    out.fit.residual = std::numeric_limits<double>::infinity();
    std::vector<double> roots;
    for (std::size_t factor : {16u, 128u, 1024u}) {
        roots = peaks_of_dual(q_poly, factor * n, threshold);
        SourceEstimate fit = fit_atoms(roots, x, known);
        if (fit.residual < out.fit.residual) out.fit = fit;
        if (out.fit.residual <= tol) break;
    }

    // Roots of 1 − Re Q closer than the grid spacing merge into one peak.
    // Splitting a fitted atom into a close pair lets the polish separate them.
    for (std::size_t extra = 0; extra < max_extra && out.fit.residual > tol; ++extra) {
        SourceEstimate best = out.fit;
        for (double spread : {0.05, 0.25}) {
            const double h = spread / static_cast<double>(n);
            for (std::size_t k = 0; k < out.fit.taus.size(); ++k) {
                std::vector<double> cand = out.fit.taus;
                cand[k] = wrap_unit(out.fit.taus[k] - h);
                cand.push_back(wrap_unit(out.fit.taus[k] + h));
                SourceEstimate fit = fit_atoms(cand, x, known);
                if (fit.residual < best.residual) best = fit;
            }
        }
        if (!(best.residual < 0.5 * out.fit.residual)) break;
        out.fit = best;
    }
    std::vector<double> set = out.fit.taus;
    for (double r : roots) {
        if (std::none_of(set.begin(), set.end(), [&](double t) { return circle_distance(r, t) < 1e-9; })) set.push_back(r);
    }
    out.identifiable = unique_on_roots(set, out.fit.taus.size(), known);
    return out;
}

} // namespace

ComplexVector compressed_toeplitz_adjoint(const HermitianMatrix& s, const IndexSet& compression)
{
    const auto m = static_cast<Index>(compression.size());
    if (s.rows() != m || s.cols() != m) throw ShapeError("compressed_toeplitz_adjoint: shape mismatch");
    ComplexVector out = ComplexVector::Zero(static_cast<Index>(compression.ambient()));
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b <= a; ++b) out[compression[a] - compression[b]] += s(a, b);
    }
    return out;
}

SdpSolution solve(const ProblemSpec& spec, const SolverConfig& config)
{
    spec.validate();
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    const std::size_t n = spec.n;
    const IndexSet comp = spec.compression_set();
    const LagStructure lags(comp, n);
    const Index m = lags.m();
    const bool exact = spec.mode == ProgramMode::ExactEquality;
    const double lambda = spec.lambda;

    const SelectionOperator omega_op(spec.omega);
    const ComplexVector data = omega_op.embed(spec.observed);
    std::vector<char> observed(n, 0);
    for (auto j : spec.omega) observed[j] = 1;

    ComplexVector x = data;
    HermitianMatrix z = HermitianMatrix::Zero(m, m);
    HermitianMatrix u = HermitianMatrix::Zero(m, m);
    double rho = config.rho;
    const double alpha = config.over_relaxation;

    SdpSolution sol;
    sol.compression = comp;
    sol.omega = spec.omega;
    sol.mode = spec.mode;
    sol.lambda = lambda;

    double r_norm = 0.0;
    double s_norm = 0.0;
    int iter = 0;
    bool converged = false;
    HermitianMatrix ax;
    for (iter = 1; iter <= config.max_iters; ++iter) {
        // x-update: each lag of x couples to a fixed set of entries of W = Z − U,
        // so the least-squares subproblem is solved lag by lag.
        const ComplexVector sums = lags.lag_sums(z - u);
        for (auto d : lags.lags()) {
            const double mult = static_cast<double>(lags.multiplicity(d));
            const Complex mean = sums[d] / mult;
            if (d == 0) {
                const double w0 = mean.real();
                double r0;
                if (exact) {
                    r0 = observed[0] ? data[0].real() : w0 - 1.0 / (rho * mult);
                } else {
                    r0 = observed[0] ? (data[0].real() - lambda + rho * mult * w0) / (1.0 + rho * mult)
                                     : w0 - lambda / (rho * mult);
                }
                x[0] = Complex(r0, observed[0] ? data[0].imag() : 0.0);
                continue;
            }
            if (observed[d]) {
                x[d] = exact ? data[d] : (data[d] + 2.0 * rho * mult * mean) / (1.0 + 2.0 * rho * mult);
            } else {
                x[d] = mean;
            }
        }

        ax = lags.lift(x);
        const HermitianMatrix relaxed = alpha * ax + (1.0 - alpha) * z;
        const Split parts = split_psd(relaxed + u);
        const HermitianMatrix z_old = z;
        z = parts.positive;
        u = parts.negative;

        r_norm = (ax - z).norm();
        s_norm = rho * (z - z_old).norm();
        const double eps_pri = static_cast<double>(m) * config.eps_abs +
            config.eps_rel * std::max(ax.norm(), z.norm());
        const double eps_dual = static_cast<double>(m) * config.eps_abs + config.eps_rel * rho * u.norm();
        if (config.record_history) sol.history.push_back({iter, r_norm, s_norm, rho});
        if (r_norm <= eps_pri && s_norm <= eps_dual) {
            converged = true;
            break;
        }
        if (config.adaptive_rho && iter % 10 == 0) {
            if (r_norm > 10.0 * s_norm) {
                rho *= 2.0;
                u /= 2.0;
            } else if (s_norm > 10.0 * r_norm) {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    sol.iterations = std::min(iter, config.max_iters);
    sol.primal_residual = r_norm;
    sol.dual_residual = s_norm;
    sol.rho = rho;
    if (converged) {
        sol.status = SolveStatus::Converged;
    } else {
        sol.status = r_norm > 1e-3 * std::max(1.0, ax.norm()) ? SolveStatus::Infeasible : SolveStatus::MaxIterations;
    }

    // Dual extraction. −ρU is the multiplier of Z ⪰ 0 (PSD by construction).
    HermitianMatrix s_mult = -rho * u;
    if (!exact && lambda > 0.0) s_mult /= lambda;
    sol.dual_source = DualSource::Multiplier;
    HermitianMatrix s_dual = s_mult;

    if (exact) {
        // (e_0, 0) is always dual optimal here, and the multiplier tends to it
        // whenever the data pins the LMI. The kernel projector of Ẑ is a
        // complementary optimum whenever its q stays supported on Ω.
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(z);
        const RealVector lam = es.eigenvalues();
        const double lmax = lam.size() > 0 ? lam.maxCoeff() : 0.0;
        // Eigenvalues of Ẑ are only as accurate as the coupling Ax = Z holds.
        const double floor = std::max(config.dual_rank_tol * lmax, 10.0 * r_norm);
        std::vector<Index> kernel;
        for (Index k = 0; k < lam.size(); ++k) {
            if (lam[k] <= floor) kernel.push_back(k);
        }
        bool accepted = false;
        if (!kernel.empty()) {
            ComplexMatrix basis(m, static_cast<Index>(kernel.size()));
            for (std::size_t k = 0; k < kernel.size(); ++k) basis.col(static_cast<Index>(k)) = es.eigenvectors().col(kernel[k]);
            const HermitianMatrix s_c = basis * basis.adjoint() / static_cast<double>(kernel.size());
            const ComplexVector q_c = stationary_q(s_c, comp);
            double off = 0.0;
            restrict_to(q_c, spec.omega, &off);
            if (off <= 1e-9 * std::max(1.0, q_c.norm())) {
                s_dual = symmetrize(s_c);
                sol.dual_source = DualSource::Complementary;
                accepted = true;
            }
        }
        if (!accepted && s_mult.norm() <= 1e-12) {
            s_dual = HermitianMatrix::Zero(m, m);
            sol.dual_source = DualSource::Trivial;
        }
    }
    sol.s_hat = symmetrize(s_dual);
    sol.q_hat = restrict_to(stationary_q(sol.s_hat, comp), spec.omega, &sol.q_off_support);

    // Completion of coordinates that neither the data nor the LMI touch.
    const IndexSet known = spec.omega.united_with(lags.lags());
    sol.free_coordinates = known.complement();
    if (!sol.free_coordinates.empty()) {
        const ComplexVector known_values = SelectionOperator(known).apply(x);
        const double scale = std::max(1.0, known_values.norm());
        if (known_values.norm() == 0.0) {
            for (auto j : sol.free_coordinates) x[j] = 0.0;
        } else {
            const double threshold = exact ? config.completion_threshold_exact : config.completion_threshold_denoise;
            const Completion done = complete(TrigPolynomial(sol.q_hat, ExponentSign::Negative), x, known, threshold,
                                             static_cast<std::size_t>(m));
            const ComplexVector model = synthesize(done.fit.taus, done.fit.amplitudes, static_cast<Index>(n));
            for (auto j : sol.free_coordinates) x[j] = model[j];
            sol.completion_residual = done.fit.residual / scale;
            const bool failed = sol.completion_residual > 1e-9 || !done.identifiable;
            if (exact && sol.status == SolveStatus::Converged && failed) sol.status = SolveStatus::CompletionFailed;
        }
    }
    sol.x_hat = x;

    const ComplexVector x_omega = omega_op.apply(x);
    const ComplexVector q_omega = omega_op.apply(sol.q_hat);
    if (exact) {
        sol.objective = x[0].real();
        sol.dual_objective = spec.observed.dot(q_omega).real();
    } else {
        sol.objective = 0.5 * (x_omega - spec.observed).squaredNorm() + lambda * x[0].real();
        sol.dual_objective = lambda * spec.observed.dot(q_omega).real() - 0.5 * lambda * lambda * q_omega.squaredNorm();
    }

    sol.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

DualPolynomial dual_polynomial(const SdpSolution& solution)
{
    return {TrigPolynomial(solution.q_hat, ExponentSign::Negative), solution.converged()};
}

bool DualFeasibilityReport::passed(double tol) const
{
    return stationarity <= tol && min_eig_s >= -tol && q_off_support <= tol;
}

DualFeasibilityReport check_dual_feasibility(const ComplexVector& q, const HermitianMatrix& s,
                                             const IndexSet& compression, const IndexSet& omega)
{
    if (static_cast<std::size_t>(q.size()) != compression.ambient()) throw ShapeError("check_dual_feasibility: q length");
    DualFeasibilityReport report;
    ComplexVector residual = compressed_toeplitz_adjoint(s, compression) + apply_k(q);
    residual[0] -= 1.0;
    report.stationarity = residual.norm();
    report.min_eig_s = s.size() > 0 ? hermitian_eig(symmetrize(s)).values.minCoeff() : 0.0;
    restrict_to(q, omega, &report.q_off_support);
    return report;
}

DualFeasibilityReport check_dual_feasibility(const SdpSolution& solution, const ProblemSpec& spec)
{
    return check_dual_feasibility(solution.q_hat, solution.s_hat, spec.compression_set(), spec.omega);
}

} // namespace canm
