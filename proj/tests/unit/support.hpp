#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "canm/geometry.hpp"
#include "canm/linalg.hpp"

namespace canm::test {

inline ComplexVector random_vector(std::mt19937_64& rng, Index n)
{
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (Index k = 0; k < n; ++k) v[k] = Complex(g(rng), g(rng));
    return v;
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols)
{
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) m(r, c) = Complex(g(rng), g(rng));
    }
    return m;
}

inline HermitianMatrix random_hermitian(std::mt19937_64& rng, Index n)
{
    const ComplexMatrix a = random_matrix(rng, n, n);
    return (a + a.adjoint()) * 0.5;
}

/// Direct e^{i2πnτ} evaluation, independent of the library's atom().
inline Complex cis(double phase)
{
    return {std::cos(phase), std::sin(phase)};
}

inline std::vector<double> random_taus(std::mt19937_64& rng, std::size_t count)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> taus;
    while (taus.size() < count) {
        const double t = u(rng);
        bool ok = true;
        for (double s : taus) ok = ok && std::min(std::abs(s - t), 1.0 - std::abs(s - t)) > 1e-6;
        if (ok) taus.push_back(t);
    }
    std::sort(taus.begin(), taus.end());
    return taus;
}

inline std::vector<double> random_amplitudes(std::mt19937_64& rng, std::size_t count, double lo = 0.5, double hi = 2.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> c(count);
    for (auto& v : c) v = u(rng);
    return c;
}

/// x = Σ c_k a(τ_k), evaluated entry by entry.
inline ComplexVector brute_signal(const std::vector<double>& taus, const std::vector<double>& amps, Index n)
{
    ComplexVector x = ComplexVector::Zero(n);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        for (Index j = 0; j < n; ++j) x[j] += amps[k] * cis(kTwoPi * static_cast<double>(j) * taus[k]);
    }
    return x;
}

/// Random compression set containing 0 of the given size.
inline IndexSet random_compression(std::mt19937_64& rng, std::size_t n, std::size_t m)
{
    std::vector<IndexSet::value_type> pool;
    for (std::size_t k = 1; k < n; ++k) pool.push_back(static_cast<IndexSet::value_type>(k));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<IndexSet::value_type> idx{0};
    idx.insert(idx.end(), pool.begin(), pool.begin() + static_cast<long>(m - 1));
    return IndexSet::from_unsorted(idx, n);
}

} // namespace canm::test
