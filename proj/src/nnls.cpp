// Lawson-Hanson active-set nonnegative least squares.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "canm/linalg.hpp"

namespace canm {

namespace {

RealVector solve_passive(const RealMatrix& a, const RealVector& b, const std::vector<Index>& passive)
{
    RealMatrix ap(a.rows(), static_cast<Index>(passive.size()));
    for (std::size_t k = 0; k < passive.size(); ++k) ap.col(static_cast<Index>(k)) = a.col(passive[k]);
    return ap.colPivHouseholderQr().solve(b);
}

} // namespace

NnlsResult nnls(const RealMatrix& a, const RealVector& b, const NnlsOptions& options)
{
    const Index m = a.rows();
    const Index n = a.cols();
    NnlsResult result;
    result.x = RealVector::Zero(n);
    if (n == 0 || m == 0) {
        result.residual_norm = b.norm();
        return result;
    }

    const double eps = std::numeric_limits<double>::epsilon();
    const double tol = options.tolerance > 0.0
        ? options.tolerance
        : 10.0 * eps * static_cast<double>(std::max(m, n)) * a.norm() * std::max(1.0, b.norm());
    const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(3 * n) + 10;

    std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    RealVector& x = result.x;
    RealVector w = a.transpose() * (b - a * x);

    int iter = 0;
    while (true) {
        Index t = -1;
        double best = tol;
        for (Index j = 0; j < n; ++j) {
            if (!in_passive[j] && !blocked[j] && w[j] > best) {
                best = w[j];
                t = j;
            }
        }
        if (t < 0) break;
        if (++iter > max_iter) {
            result.converged = false;
            break;
        }
        in_passive[t] = 1;

        std::vector<Index> passive;
        for (Index j = 0; j < n; ++j) {
            if (in_passive[j]) passive.push_back(j);
        }
        RealVector z = solve_passive(a, b, passive);

        // Numerically the entering variable can come out nonpositive; exclude
        // it until the active set changes, otherwise the loop cycles.
        {
            const auto pos = std::find(passive.begin(), passive.end(), t) - passive.begin();
            if (z[pos] <= 0.0) {
                in_passive[t] = 0;
                blocked[t] = 1;
                continue;
            }
        }

        int inner = 0;
        while (true) {
            bool feasible = true;
            for (Index k = 0; k < z.size(); ++k) {
                if (z[k] <= 0.0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) break;
            if (++inner > 3 * n) {
                result.converged = false;
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < passive.size(); ++k) {
                if (z[static_cast<Index>(k)] <= 0.0) {
                    const double xj = x[passive[k]];
                    const double denom = xj - z[static_cast<Index>(k)];
                    if (denom > 0.0) alpha = std::min(alpha, xj / denom);
                }
            }
            if (!std::isfinite(alpha)) alpha = 0.0;
            for (std::size_t k = 0; k < passive.size(); ++k) {
                const Index j = passive[k];
                x[j] += alpha * (z[static_cast<Index>(k)] - x[j]);
            }
            const double floor = 1e-14 * std::max(1.0, x.cwiseAbs().maxCoeff());
            for (std::size_t k = 0; k < passive.size(); ++k) {
                const Index j = passive[k];
                if (x[j] <= floor) {
                    in_passive[j] = 0;
                    x[j] = 0.0;
                }
            }
            passive.clear();
            for (Index j = 0; j < n; ++j) {
                if (in_passive[j]) passive.push_back(j);
            }
            if (passive.empty()) {
                z.resize(0);
                break;
            }
            z = solve_passive(a, b, passive);
        }

        x.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) x[passive[k]] = std::max(0.0, z[static_cast<Index>(k)]);
        std::fill(blocked.begin(), blocked.end(), 0);
        w = a.transpose() * (b - a * x);
    }

    result.iterations = iter;
    result.residual_norm = (a * x - b).norm();
    return result;
}

NnlsResult complex_nnls(const ComplexMatrix& a, const ComplexVector& b, const NnlsOptions& options)
{
    const Index m = a.rows();
    RealMatrix ar(2 * m, a.cols());
    ar.topRows(m) = a.real();
    ar.bottomRows(m) = a.imag();
    RealVector br(2 * m);
    br.head(m) = b.real();
    br.tail(m) = b.imag();
    return nnls(ar, br, options);
}

} // namespace canm
