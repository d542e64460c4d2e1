#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace canm {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
/// Dense complex matrix expected to satisfy H = H^H.
using HermitianMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Discrete complex exponential [1, e^{i2πτ}, ..., e^{i2π(N-1)τ}].
///
/// Throws DomainError unless 0 <= tau < 1 and n >= 1.
ComplexVector atom(double tau, Index n);

/// Same as atom() but accepts any real tau (wrapped modulo 1).
ComplexVector atom_unchecked(double tau, Index n);

/// Hermitian Toeplitz matrix with first column x. The diagonal uses Re(x_0).
HermitianMatrix toeplitz(const ComplexVector& x);

/// Adjoint of toeplitz(): entry j is the sum of the j-th subdiagonal of h
/// (j = 0 is the trace).
ComplexVector toeplitz_adjoint(const ComplexMatrix& h);

/// Diagonal weights K = diag(1, 1/2, ..., 1/2) applied to q.
ComplexVector apply_k(const ComplexVector& q);
/// K^{-1} = diag(1, 2, ..., 2) applied to q.
ComplexVector apply_k_inverse(const ComplexVector& q);

/// Max-norm asymmetry ‖H − H^H‖_max.
double hermitian_defect(const ComplexMatrix& h);

/// Returns 0.5 (H + H^H).
HermitianMatrix symmetrize(const ComplexMatrix& h);

struct EigenDecomposition {
    RealVector values;     ///< descending
    ComplexMatrix vectors; ///< unitary, columns match `values`
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Throws DomainError if h is not Hermitian within 1e-10 relative.
EigenDecomposition hermitian_eig(const HermitianMatrix& h);

/// Frobenius-nearest positive semidefinite matrix.
HermitianMatrix psd_project(const HermitianMatrix& h);

/// Unit-norm vector in the nullspace of v (p x M, p < M). Picks the right
/// singular vector belonging to the first singular value at or below
/// 1e-10 σ_max; the zero matrix yields the last right singular vector.
/// The first nonzero entry is made real positive.
ComplexVector nullspace_vector(const ComplexMatrix& v);

/// Multiplies u by a unit phase so its first entry above `tol` in modulus is real positive.
void normalize_phase(ComplexVector& u, double tol = 1e-14);

enum class ExponentSign {
    Negative, ///< Σ c_n e^{-i2πnτ}
    Positive, ///< Σ c_n e^{+i2πnτ}
};

/// Trigonometric polynomial of degree N-1 with explicit sign convention.
class TrigPolynomial {
public:
    TrigPolynomial() = default;
    explicit TrigPolynomial(ComplexVector coefficients,
                            ExponentSign sign = ExponentSign::Negative);

    const ComplexVector& coefficients() const { return coeffs_; }
    ExponentSign sign() const { return sign_; }
    Index degree_bound() const { return coeffs_.size(); }

    Complex operator()(double tau) const;
    ComplexVector evaluate(std::span<const double> grid) const;

    /// Re P(τ) with its first and second derivatives in τ.
    struct RealJet {
        double value;
        double d1;
        double d2;
    };
    RealJet real_jet(double tau) const;

private:
    ComplexVector coeffs_;
    ExponentSign sign_ = ExponentSign::Negative;
};

/// `count` equispaced points k / count on [0, 1).
std::vector<double> uniform_grid(std::size_t count);

/// Circle distance min(|a-b|, 1-|a-b|) on the unit torus.
double circle_distance(double a, double b);

/// Wraps a real number into [0, 1).
double wrap_unit(double tau);

struct NnlsOptions {
    int max_iterations = 0; ///< 0 means 3 * columns
    double tolerance = 0.0; ///< 0 means an automatic scale-aware value
};

struct NnlsResult {
    RealVector x;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = true;
};

/// Lawson-Hanson active-set solution of min ‖Ax − b‖ subject to x >= 0.
NnlsResult nnls(const RealMatrix& a, const RealVector& b, const NnlsOptions& options = {});

/// NNLS with a complex design matrix: real nonnegative coefficients c
/// minimizing ‖A c − b‖ with A, b complex.
NnlsResult complex_nnls(const ComplexMatrix& a, const ComplexVector& b,
                        const NnlsOptions& options = {});

} // namespace canm
