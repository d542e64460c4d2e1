#include "canm/source_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "canm/error.hpp"

namespace canm {

void SourceModel::validate() const
{
    if (taus.size() != powers.size()) throw DomainError("SourceModel: taus and powers differ in length");
    if (aperture < 1) throw DomainError("SourceModel: aperture must be positive");
    for (std::size_t k = 0; k < taus.size(); ++k) {
        if (!(taus[k] >= 0.0 && taus[k] < 1.0)) throw DomainError("SourceModel: tau outside [0, 1)");
        if (!(powers[k] > 0.0)) throw DomainError("SourceModel: powers must be positive");
        for (std::size_t j = 0; j < k; ++j) {
            if (taus[j] == taus[k]) throw DomainError("SourceModel: duplicate tau");
        }
    }
}

ComplexVector SourceModel::signal() const
{
    validate();
    return synthesize(taus, powers, static_cast<Index>(aperture));
}

double SourceModel::total_power() const
{
    return std::accumulate(powers.begin(), powers.end(), 0.0);
}

ComplexVector synthesize(std::span<const double> taus, std::span<const double> amplitudes, Index n)
{
    if (taus.size() != amplitudes.size()) throw ShapeError("synthesize: length mismatch");
    ComplexVector x = ComplexVector::Zero(n);
    for (std::size_t k = 0; k < taus.size(); ++k) x += amplitudes[k] * atom_unchecked(taus[k], n);
    return x;
}

std::vector<double> peaks_of_dual(const TrigPolynomial& dual, std::size_t grid_size, double threshold)
{
    std::vector<double> peaks;
    if (grid_size < 3 || dual.degree_bound() == 0) return peaks;
    const std::vector<double> grid = uniform_grid(grid_size);
    const ComplexVector values = dual.evaluate(grid);
    const double h = 1.0 / static_cast<double>(grid_size);
    const auto g_count = static_cast<Index>(grid_size);

    for (Index g = 0; g < g_count; ++g) {
        const double left = values[(g + g_count - 1) % g_count].real();
        const double mid = values[g].real();
        const double right = values[(g + 1) % g_count].real();
        if (!(mid >= left && mid > right)) continue;

        double offset = 0.0;
        const double curvature = left - 2.0 * mid + right;
        if (curvature < 0.0) offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
        double tau = (static_cast<double>(g) + offset) * h;

        // Newton on the derivative sharpens the parabolic estimate; steps are
        // confined to one grid cell so the iterate stays on this peak.
        const double anchor = tau;
        for (int it = 0; it < 30; ++it) {
            const auto jet = dual.real_jet(tau);
            if (!(jet.d2 < 0.0)) break;
            double step = -jet.d1 / jet.d2;
            step = std::clamp(step, -h, h);
            tau += step;
            if (std::abs(tau - anchor) > 1.5 * h) {
                tau = anchor;
                break;
            }
            if (std::abs(step) < 1e-15) break;
        }
        double value = dual.real_jet(tau).value;
        if (value < mid) {
            tau = static_cast<double>(g) * h;
            value = mid;
        }
        if (value >= threshold) peaks.push_back(wrap_unit(tau));
    }

    std::sort(peaks.begin(), peaks.end());
    std::vector<double> unique;
    for (double t : peaks) {
        if (unique.empty() || circle_distance(unique.back(), t) > 1e-10) unique.push_back(t);
    }
    if (unique.size() > 1 && circle_distance(unique.front(), unique.back()) <= 1e-10) unique.pop_back();
    return unique;
}

std::vector<double> strongest_peaks(const TrigPolynomial& dual, std::size_t grid_size, std::size_t count)
{
    std::vector<double> all = peaks_of_dual(dual, grid_size, -std::numeric_limits<double>::infinity());
    if (all.size() <= count) return all;
    std::vector<std::pair<double, double>> ranked;
    for (double t : all) ranked.emplace_back(dual(t).real(), t);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(ranked[k].second);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

ComplexMatrix atom_matrix(std::span<const double> taus, const IndexSet& rows)
{
    ComplexMatrix a(static_cast<Index>(rows.size()), static_cast<Index>(taus.size()));
    for (std::size_t k = 0; k < taus.size(); ++k) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double phase = kTwoPi * wrap_unit(static_cast<double>(rows[r]) * taus[k]);
            a(static_cast<Index>(r), static_cast<Index>(k)) = Complex(std::cos(phase), std::sin(phase));
        }
    }
    return a;
}

double fit_cost(std::span<const double> taus, std::span<const double> amps, const IndexSet& known,
                const ComplexVector& target)
{
    const ComplexMatrix a = atom_matrix(taus, known);
    const Eigen::Map<const RealVector> c(amps.data(), static_cast<Index>(amps.size()));
    return (a * c.cast<Complex>() - target).squaredNorm();
}

// Damped Gauss-Newton on (τ, c) for ‖Σ c_k a_K(τ_k) − target‖².
void polish(std::vector<double>& taus, std::vector<double>& amps, const IndexSet& known,
            const ComplexVector& target, int max_iterations)
{
    const std::size_t p = taus.size();
    if (p == 0) return;
    const auto rows = static_cast<Index>(known.size());
    double cost = fit_cost(taus, amps, known, target);
    double mu = 1e-6;
    for (int it = 0; it < max_iterations; ++it) {
        const ComplexMatrix a = atom_matrix(taus, known);
        ComplexVector resid = -target;
        for (std::size_t k = 0; k < p; ++k) resid += amps[k] * a.col(static_cast<Index>(k));
        RealMatrix jac(2 * rows, static_cast<Index>(2 * p));
        for (std::size_t k = 0; k < p; ++k) {
            for (Index r = 0; r < rows; ++r) {
                const Complex ak = a(r, static_cast<Index>(k));
                const Complex dtau = amps[k] * Complex(0.0, kTwoPi * static_cast<double>(known[r])) * ak;
                jac(r, static_cast<Index>(k)) = dtau.real();
                jac(r + rows, static_cast<Index>(k)) = dtau.imag();
                jac(r, static_cast<Index>(p + k)) = ak.real();
                jac(r + rows, static_cast<Index>(p + k)) = ak.imag();
            }
        }
        RealVector rr(2 * rows);
        rr.head(rows) = resid.real();
        rr.tail(rows) = resid.imag();
        const RealVector grad = jac.transpose() * rr;
        if (grad.norm() <= 1e-15 * std::max(1.0, target.norm())) break;
        const RealVector col_scale = jac.colwise().norm().transpose().array() + 1e-12;

        // Levenberg-Marquardt step from the stacked system [J; sqrt(mu) D] s = [-r; 0],
        // solved by QR so that clustered atoms keep their accuracy.
        bool accepted = false;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            RealMatrix stacked(jac.rows() + jac.cols(), jac.cols());
            stacked.topRows(jac.rows()) = jac;
            stacked.bottomRows(jac.cols()) = (std::sqrt(mu) * col_scale).asDiagonal();
            RealVector rhs = RealVector::Zero(stacked.rows());
            rhs.head(jac.rows()) = -rr;
            RealVector step = stacked.colPivHouseholderQr().solve(rhs);
            // Fraction to the boundary: an amplitude may at most halve per step,
            // so an atom never loses its location gradient abruptly.
            double fraction = 1.0;
            for (std::size_t k = 0; k < p; ++k) {
                const double dc = step[static_cast<Index>(p + k)];
                if (dc < -0.5 * amps[k]) fraction = std::min(fraction, 0.5 * amps[k] / -dc);
            }
            step *= fraction;
            std::vector<double> t2(taus);
            std::vector<double> c2(amps);
            for (std::size_t k = 0; k < p; ++k) {
                t2[k] = wrap_unit(taus[k] + step[static_cast<Index>(k)]);
                c2[k] = amps[k] + step[static_cast<Index>(p + k)];
            }
            const double cost2 = fit_cost(t2, c2, known, target);
            if (cost2 < cost) {
                const double gain = cost - cost2;
                taus.swap(t2);
                amps.swap(c2);
                cost = cost2;
                mu = std::max(mu / 10.0, 1e-15);
                accepted = true;
                if (step.norm() < 1e-14 || gain <= 1e-30) return;
            } else {
                mu *= 10.0;
            }
        }
        if (!accepted) return;
    }
}

} // namespace

SourceEstimate fit_atoms(std::span<const double> candidates, const ComplexVector& values,
                         const IndexSet& known, const AtomicFitOptions& options)
{
    if (static_cast<std::size_t>(values.size()) != known.ambient()) {
        throw ShapeError("fit_atoms: values length does not match the ambient of the known set");
    }
    SourceEstimate est;
    est.method = ExtractionMethod::AtomicFit;
    const ComplexVector target = SelectionOperator(known).apply(values);

    std::vector<double> cand(candidates.begin(), candidates.end());
    for (double& t : cand) t = wrap_unit(t);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](double a, double b) { return circle_distance(a, b) < 1e-12; }),
               cand.end());
    if (cand.empty() || known.empty()) {
        est.residual = target.norm();
        return est;
    }

    const ComplexMatrix a = atom_matrix(cand, known);
    const NnlsResult fit = complex_nnls(a, target);

    // Unconstrained least squares flags amplitudes that want to go negative.
    if (cand.size() <= 2 * known.size()) {
        RealMatrix ar(2 * a.rows(), a.cols());
        ar.topRows(a.rows()) = a.real();
        ar.bottomRows(a.rows()) = a.imag();
        RealVector br(2 * a.rows());
        br.head(a.rows()) = target.real();
        br.tail(a.rows()) = target.imag();
        const RealVector ls = ar.colPivHouseholderQr().solve(br);
        const double scale = std::max(1e-300, ls.cwiseAbs().maxCoeff());
        if ((ar * ls - br).norm() <= 1e-8 * std::max(1.0, br.norm()) && ls.minCoeff() < -1e-6 * scale) {
            est.clamped = true;
        }
    }

    const double cmax = fit.x.size() > 0 ? fit.x.maxCoeff() : 0.0;
    std::vector<double> taus;
    std::vector<double> amps;
    for (Index k = 0; k < fit.x.size(); ++k) {
        if (fit.x[k] > options.prune_ratio * cmax && fit.x[k] > 0.0) {
            taus.push_back(cand[static_cast<std::size_t>(k)]);
            amps.push_back(fit.x[k]);
        }
    }
    polish(taus, amps, known, target, options.max_iterations);

    // NNLS can drop one atom of a tight cluster at slightly wrong locations;
    // retry from every candidate when the support alone leaves a residual.
    const double floor = 1e-11 * std::max(1.0, target.norm());
    if (taus.size() < cand.size() && cand.size() <= known.size() && fit_cost(taus, amps, known, target) > floor * floor) {
        std::vector<double> all_taus(cand);
        std::vector<double> all_amps(cand.size());
        for (std::size_t k = 0; k < cand.size(); ++k) all_amps[k] = std::max(fit.x[static_cast<Index>(k)], 1e-3 * cmax);
        polish(all_taus, all_amps, known, target, options.max_iterations);
        if (fit_cost(all_taus, all_amps, known, target) < fit_cost(taus, amps, known, target)) {
            taus.swap(all_taus);
            amps.swap(all_amps);
        }
    }

    const double amax = amps.empty() ? 0.0 : *std::max_element(amps.begin(), amps.end());
    std::vector<std::size_t> order(taus.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return taus[l] < taus[r]; });
    for (auto k : order) {
        if (amps[k] > options.prune_ratio * amax && amps[k] > 0.0) {
            if (!est.taus.empty() && taus[k] - est.taus.back() < 1e-12) {
                est.amplitudes.back() += amps[k];
                continue;
            }
            est.taus.push_back(taus[k]);
            est.amplitudes.push_back(amps[k]);
        }
    }
    const ComplexVector model = atom_matrix(est.taus, known) *
        Eigen::Map<const RealVector>(est.amplitudes.data(), static_cast<Index>(est.amplitudes.size())).cast<Complex>();
    est.residual = (model - target).norm();
    return est;
}

SourceEstimate vandermonde_decompose(const ComplexVector& x_hat, double rank_tol)
{
    const Index n = x_hat.size();
    SourceEstimate est;
    est.method = ExtractionMethod::Vandermonde;
    if (n == 0 || x_hat.cwiseAbs().maxCoeff() == 0.0) return est;

    const EigenDecomposition eig = hermitian_eig(toeplitz(x_hat));
    const double lmax = eig.values[0];
    const double lmin = eig.values[n - 1];
    if (lmax <= 0.0 || lmin < -rank_tol * lmax) {
        throw NotPsdError("vandermonde_decompose: T(x) has eigenvalue " + std::to_string(lmin) +
                          " below -rank_tol * lambda_max");
    }
    Index r = 0;
    while (r < n && eig.values[r] > rank_tol * lmax) ++r;
    r = std::min(r, n - 1);
    if (r == 0) {
        est.residual = x_hat.norm();
        return est;
    }

    const ComplexMatrix us = eig.vectors.leftCols(r);
    const ComplexMatrix upper = us.topRows(n - 1);
    const ComplexMatrix lower = us.bottomRows(n - 1);
    const ComplexMatrix pencil = upper.completeOrthogonalDecomposition().solve(lower);
    Eigen::ComplexEigenSolver<ComplexMatrix> ces(pencil);
    std::vector<double> taus;
    for (Index k = 0; k < r; ++k) taus.push_back(wrap_unit(std::arg(ces.eigenvalues()[k]) / kTwoPi));

    SourceEstimate fitted = fit_atoms(taus, x_hat, IndexSet::full(static_cast<std::size_t>(n)));
    fitted.method = ExtractionMethod::Vandermonde;
    return fitted;
}

bool MatchReport::all_within(double tolerance) const
{
    return missed.empty() && max_error <= tolerance;
}

namespace {

// Hungarian algorithm for a rows <= cols cost matrix; returns the column of each row.
std::vector<std::size_t> assign(const RealMatrix& cost)
{
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Index>(i0 - 1), static_cast<Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

} // namespace

MatchReport match_sources(std::span<const double> estimate, std::span<const double> truth, double max_distance)
{
    MatchReport report;
    const std::size_t nt = truth.size();
    const std::size_t ne = estimate.size();
    std::vector<char> truth_used(nt, 0), est_used(ne, 0);
    if (nt > 0 && ne > 0) {
        const bool transpose = nt > ne;
        const std::size_t rows = transpose ? ne : nt;
        const std::size_t cols = transpose ? nt : ne;
        RealMatrix cost(static_cast<Index>(rows), static_cast<Index>(cols));
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double t = transpose ? truth[c] : truth[r];
                const double e = transpose ? estimate[r] : estimate[c];
                cost(static_cast<Index>(r), static_cast<Index>(c)) = circle_distance(t, e);
            }
        }
        const auto pairing = assign(cost);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t ti = transpose ? pairing[r] : r;
            const std::size_t ei = transpose ? r : pairing[r];
            const double err = circle_distance(truth[ti], estimate[ei]);
            if (err > max_distance) continue;
            report.matches.push_back({ti, ei, err});
            truth_used[ti] = 1;
            est_used[ei] = 1;
        }
    }
    for (std::size_t k = 0; k < nt; ++k) {
        if (!truth_used[k]) report.missed.push_back(k);
    }
    for (std::size_t k = 0; k < ne; ++k) {
        if (!est_used[k]) report.spurious.push_back(k);
    }
    std::sort(report.matches.begin(), report.matches.end(),
              [](const auto& a, const auto& b) { return a.truth_index < b.truth_index; });
    std::vector<double> errors;
    for (const auto& m : report.matches) errors.push_back(m.error);
    if (!errors.empty()) {
        report.max_error = *std::max_element(errors.begin(), errors.end());
        std::sort(errors.begin(), errors.end());
        const std::size_t mid = errors.size() / 2;
        report.median_error = errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    }
    return report;
}

MatchReport match_sources(const SourceEstimate& estimate, const SourceModel& truth, double max_distance)
{
    return match_sources(estimate.taus, truth.taus, max_distance);
}

} // namespace canm
