#include "canm/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "canm/error.hpp"

namespace canm {

ComplexVector atom_unchecked(double tau, Index n)
{
    ComplexVector a(n);
    for (Index k = 0; k < n; ++k) {
        // Reduce the phase argument before the exponential to keep large
        // indices accurate.
        const double phase = kTwoPi * wrap_unit(static_cast<double>(k) * tau);
        a[k] = Complex(std::cos(phase), std::sin(phase));
    }
    if (n > 0) a[0] = Complex(1.0, 0.0);
    return a;
}

ComplexVector atom(double tau, Index n)
{
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw DomainError("atom: tau must lie in [0, 1)");
    }
    if (n < 1) throw DomainError("atom: length must be positive");
    return atom_unchecked(tau, n);
}

HermitianMatrix toeplitz(const ComplexVector& x)
{
    const Index n = x.size();
    HermitianMatrix t(n, n);
    for (Index k = 0; k < n; ++k) {
        t(k, k) = Complex(x[0].real(), 0.0);
        for (Index j = k + 1; j < n; ++j) {
            t(j, k) = x[j - k];
            t(k, j) = std::conj(x[j - k]);
        }
    }
    return t;
}

ComplexVector toeplitz_adjoint(const ComplexMatrix& h)
{
    if (h.rows() != h.cols()) throw ShapeError("toeplitz_adjoint: matrix must be square");
    const Index n = h.rows();
    ComplexVector out = ComplexVector::Zero(n);
    for (Index j = 0; j < n; ++j) {
        Complex s(0.0, 0.0);
        for (Index l = 0; l + j < n; ++l) s += h(j + l, l);
        out[j] = s;
    }
    return out;
}

ComplexVector apply_k(const ComplexVector& q)
{
    ComplexVector out = 0.5 * q;
    if (q.size() > 0) out[0] = q[0];
    return out;
}

ComplexVector apply_k_inverse(const ComplexVector& q)
{
    ComplexVector out = 2.0 * q;
    if (q.size() > 0) out[0] = q[0];
    return out;
}

double hermitian_defect(const ComplexMatrix& h)
{
    if (h.rows() != h.cols()) throw ShapeError("hermitian_defect: matrix must be square");
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

HermitianMatrix symmetrize(const ComplexMatrix& h)
{
    if (h.rows() != h.cols()) throw ShapeError("symmetrize: matrix must be square");
    return 0.5 * (h + h.adjoint());
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h)
{
    if (h.rows() != h.cols()) throw ShapeError("hermitian_eig: matrix must be square");
    const Index n = h.rows();
    if (n == 0) return {};
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermitian_defect(h) > 1e-10 * scale) {
        throw DomainError("hermitian_eig: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw DomainError("hermitian_eig: no convergence");
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

HermitianMatrix psd_project(const HermitianMatrix& h)
{
    const EigenDecomposition eig = hermitian_eig(h);
    const RealVector clamped = eig.values.cwiseMax(0.0);
    HermitianMatrix out = eig.vectors * clamped.asDiagonal() * eig.vectors.adjoint();
    return symmetrize(out);
}

void normalize_phase(ComplexVector& u, double tol)
{
    for (Index k = 0; k < u.size(); ++k) {
        const double mag = std::abs(u[k]);
        if (mag > tol) {
            u *= std::conj(u[k]) / mag;
            u[k] = Complex(std::abs(u[k]), 0.0);
            return;
        }
    }
}

ComplexVector nullspace_vector(const ComplexMatrix& v)
{
    const Index p = v.rows();
    const Index m = v.cols();
    if (m < 1) throw ShapeError("nullspace_vector: matrix has no columns");
    if (p >= m) throw RankError("nullspace_vector: p >= M, nullspace may be empty");

    ComplexMatrix right;
    RealVector sigma;
    if (p == 0) {
        right = ComplexMatrix::Identity(m, m);
        sigma.resize(0);
    } else {
        Eigen::JacobiSVD<ComplexMatrix> svd(v, Eigen::ComputeFullV);
        right = svd.matrixV();
        sigma = svd.singularValues();
    }

    const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    Index pick = m - 1;
    if (sigma_max > 0.0) {
        const double tol = 1e-10 * sigma_max;
        pick = sigma.size(); // first column beyond the numerical rank
        for (Index k = 0; k < sigma.size(); ++k) {
            if (sigma[k] <= tol) {
                pick = k;
                break;
            }
        }
    }
    ComplexVector u = right.col(pick);
    u /= u.norm();
    normalize_phase(u);
    return u;
}

TrigPolynomial::TrigPolynomial(ComplexVector coefficients, ExponentSign sign)
    : coeffs_(std::move(coefficients)), sign_(sign)
{
}

Complex TrigPolynomial::operator()(double tau) const
{
    const double s = sign_ == ExponentSign::Negative ? -1.0 : 1.0;
    Complex acc(0.0, 0.0);
    for (Index n = 0; n < coeffs_.size(); ++n) {
        const double phase = s * kTwoPi * wrap_unit(static_cast<double>(n) * tau);
        acc += coeffs_[n] * Complex(std::cos(phase), std::sin(phase));
    }
    return acc;
}

ComplexVector TrigPolynomial::evaluate(std::span<const double> grid) const
{
    ComplexVector out(static_cast<Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) out[static_cast<Index>(g)] = (*this)(grid[g]);
    return out;
}

TrigPolynomial::RealJet TrigPolynomial::real_jet(double tau) const
{
    const double s = sign_ == ExponentSign::Negative ? -1.0 : 1.0;
    Complex v(0.0, 0.0);
    Complex d1(0.0, 0.0);
    Complex d2(0.0, 0.0);
    for (Index n = 0; n < coeffs_.size(); ++n) {
        const double phase = s * kTwoPi * wrap_unit(static_cast<double>(n) * tau);
        const Complex term = coeffs_[n] * Complex(std::cos(phase), std::sin(phase));
        const double w = s * kTwoPi * static_cast<double>(n);
        v += term;
        d1 += Complex(0.0, w) * term;
        d2 += -w * w * term;
    }
    return {v.real(), d1.real(), d2.real()};
}

std::vector<double> uniform_grid(std::size_t count)
{
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = static_cast<double>(k) / static_cast<double>(count);
    }
    return grid;
}

double wrap_unit(double tau)
{
    double w = tau - std::floor(tau);
    if (w >= 1.0) w = 0.0;
    return w;
}

double circle_distance(double a, double b)
{
    const double d = std::abs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

} // namespace canm
