#include "canm/doa.hpp"

#include <cmath>
#include <random>

#include "canm/error.hpp"

namespace canm {

namespace {

ComplexVector steering(double tau, const IndexSet& array)
{
    ComplexVector a(static_cast<Index>(array.size()));
    for (std::size_t k = 0; k < array.size(); ++k) {
        const double phase = kTwoPi * wrap_unit(static_cast<double>(array[k]) * tau);
        a[static_cast<Index>(k)] = Complex(std::cos(phase), std::sin(phase));
    }
    return a;
}

void check_array(const SourceModel& model, const IndexSet& array)
{
    model.validate();
    if (array.empty()) throw DomainError("doa: empty sensor array");
    if (array.ambient() != model.aperture) {
        throw ShapeError("doa: array ambient " + std::to_string(array.ambient()) + " differs from aperture " +
                         std::to_string(model.aperture));
    }
}

} // namespace

SnapshotBatch simulate_snapshots(const SourceModel& model, const IndexSet& array, std::size_t snapshots,
                                 double sigma2, std::uint64_t seed)
{
    check_array(model, array);
    if (snapshots < 1) throw DomainError("simulate_snapshots: need at least one snapshot");
    if (!(sigma2 >= 0.0)) throw DomainError("simulate_snapshots: noise variance must be nonnegative");

    std::vector<ComplexVector> steer;
    for (double t : model.taus) steer.push_back(steering(t, array));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Circular convention: real and imaginary parts each carry half the variance.
    auto circular = [&](double variance) {
        const double s = std::sqrt(0.5 * variance);
        const double re = gauss(rng);
        const double im = gauss(rng);
        return Complex(s * re, s * im);
    };

    SnapshotBatch batch;
    batch.noise_variance = sigma2;
    batch.seed = seed;
    const auto m = static_cast<Index>(array.size());
    batch.snapshots.resize(m, static_cast<Index>(snapshots));
    for (Index l = 0; l < static_cast<Index>(snapshots); ++l) {
        ComplexVector u = ComplexVector::Zero(m);
        for (std::size_t k = 0; k < model.count(); ++k) u += circular(model.powers[k]) * steer[k];
        for (Index r = 0; r < m; ++r) u[r] += circular(sigma2);
        batch.snapshots.col(l) = u;
    }
    return batch;
}

HermitianMatrix empirical_covariance(const SnapshotBatch& batch)
{
    if (batch.snapshots.cols() < 1) throw DomainError("empirical_covariance: empty batch");
    const HermitianMatrix cov = batch.snapshots * batch.snapshots.adjoint() / static_cast<double>(batch.snapshots.cols());
    return symmetrize(cov);
}

HermitianMatrix exact_covariance(const SourceModel& model, const IndexSet& array, double sigma2)
{
    check_array(model, array);
    const auto m = static_cast<Index>(array.size());
    HermitianMatrix cov = sigma2 * HermitianMatrix::Identity(m, m);
    for (std::size_t k = 0; k < model.count(); ++k) {
        const ComplexVector a = steering(model.taus[k], array);
        cov += model.powers[k] * a * a.adjoint();
    }
    return symmetrize(cov);
}

CoarrayObservation coarray_average(const HermitianMatrix& sigma, const IndexSet& array, double sigma2)
{
    const auto m = static_cast<Index>(array.size());
    if (sigma.rows() != m || sigma.cols() != m) throw ShapeError("coarray_average: covariance size differs from |J|");

    CoarrayObservation obs;
    obs.omega = difference_set(array);
    const std::size_t n = array.ambient();
    std::vector<Complex> sums(n, Complex(0.0, 0.0));
    std::vector<std::size_t> counts(n, 0);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b <= a; ++b) {
            const std::size_t lag = array[a] - array[b];
            Complex v = sigma(a, b);
            if (a == b) v -= sigma2;
            sums[lag] += v;
            ++counts[lag];
        }
    }
    obs.y.resize(static_cast<Index>(obs.omega.size()));
    for (std::size_t k = 0; k < obs.omega.size(); ++k) {
        const auto lag = obs.omega[k];
        if (counts[lag] == 0) throw Error("coarray_average: lag without sensor pairs");
        obs.y[static_cast<Index>(k)] = sums[lag] / static_cast<double>(counts[lag]);
        obs.weights.push_back(counts[lag]);
    }
    obs.y[0] = Complex(obs.y[0].real(), 0.0);
    return obs;
}

double noise_variance_for_snr(const SourceModel& model, double snr_db)
{
    return model.total_power() / std::pow(10.0, snr_db / 10.0);
}

double snr_db_for(const SourceModel& model, double sigma2)
{
    return 10.0 * std::log10(model.total_power() / sigma2);
}

double default_lambda(double sigma2, std::size_t omega_size, std::size_t n, std::size_t snapshots)
{
    return std::sqrt(sigma2) *
        std::sqrt(static_cast<double>(omega_size) * std::log(static_cast<double>(std::max<std::size_t>(n, 2))) /
                  static_cast<double>(snapshots));
}

std::string to_string(LambdaRule rule)
{
    switch (rule) {
    case LambdaRule::NoiseFloor: return "noise_floor";
    case LambdaRule::CovarianceScale: return "covariance_scale";
    }
    return "unknown";
}

DoaResult run_doa(const SourceModel& model, const IndexSet& array, const DoaConfig& config)
{
    check_array(model, array);
    DoaResult out;
    const std::size_t n = model.aperture;
    out.sigma2 = config.exact_covariance && !std::isfinite(config.snr_db) ? 0.0 : noise_variance_for_snr(model, config.snr_db);
    out.snr_db = config.snr_db;

    const HermitianMatrix cov = config.exact_covariance
        ? exact_covariance(model, array, out.sigma2)
        : empirical_covariance(simulate_snapshots(model, array, config.snapshots, out.sigma2, config.seed));
    out.observation = coarray_average(cov, array, out.sigma2);

    out.lambda_rule = config.lambda_rule;
    if (config.lambda) {
        out.lambda = *config.lambda;
    } else {
        const double scale = config.lambda_rule == LambdaRule::NoiseFloor
            ? out.sigma2
            : std::pow(cov.diagonal().real().mean(), 2.0);
        out.lambda = default_lambda(scale, out.observation.omega.size(), n, config.snapshots);
    }
    ProblemSpec& problem = out.problem;
    problem.n = n;
    problem.omega = out.observation.omega;
    problem.observed = out.observation.y;
    if (config.compress) problem.compression = array;
    problem.mode = config.exact_covariance ? ProgramMode::ExactEquality : ProgramMode::Denoise;
    problem.lambda = config.exact_covariance ? 0.0 : out.lambda;
    if (config.exact_covariance) out.lambda = 0.0;

    out.solution = solve(problem, config.solver);
    out.guaranteed = validate_compression(array, out.observation.omega, model.count()).all_passed();

    const TrigPolynomial dual = dual_polynomial(out.solution).polynomial;
    out.grid_size = config.grid_size == 0 ? 16 * n : config.grid_size;
    out.peak_threshold = config.exact_covariance ? 1.0 - 1e-6 : config.peak_threshold;
    out.peak_count = config.peak_count;
    const std::vector<double> peaks = config.peak_count ? strongest_peaks(dual, out.grid_size, *config.peak_count)
                                                        : peaks_of_dual(dual, out.grid_size, out.peak_threshold);

    // Amplitudes for the detected peaks by a nonnegative fit on the co-array samples.
    SourceEstimate& est = out.estimate;
    est.method = ExtractionMethod::PeakPicking;
    const ComplexVector& target = out.observation.y;
    if (!peaks.empty()) {
        ComplexMatrix a(target.size(), static_cast<Index>(peaks.size()));
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            a.col(static_cast<Index>(k)) = SelectionOperator(out.observation.omega).apply(atom_unchecked(peaks[k], static_cast<Index>(n)));
        }
        const NnlsResult fit = complex_nnls(a, target);
        est.taus = peaks;
        est.amplitudes.assign(fit.x.data(), fit.x.data() + fit.x.size());
        est.residual = fit.residual_norm;
    } else {
        est.residual = target.norm();
    }

    out.dual_grid = uniform_grid(out.grid_size);
    out.dual_values = dual.evaluate(out.dual_grid).real();
    return out;
}

} // namespace canm
