#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "canm/certificate.hpp"
#include "canm/doa.hpp"
#include "canm/geometry.hpp"
#include "canm/oracle.hpp"
#include "canm/sdp_solver.hpp"
#include "canm/source_recovery.hpp"

namespace canm::io {

using Json = nlohmann::ordered_json;

// Complex vectors are arrays of [re, im] pairs throughout.
Json to_json(const ComplexVector& v);
Json to_json(const HermitianMatrix& m);
Json to_json(const IndexSet& set);
Json to_json(const SolverConfig& cfg);
Json to_json(const ProblemSpec& spec);
Json to_json(const SdpSolution& sol, bool include_history = false);
Json to_json(const CompressionReport& report);
Json to_json(const CertificateReport& report);
Json to_json(const Certificate& cert);
Json to_json(const RecoveryCertification& cert);
Json to_json(const SourceEstimate& est);
Json to_json(const MatchReport& report);
Json to_json(const CrossValidationReport& report);
/// Everything except the solution's matrices and the dual grid samples.
Json to_json(const DoaResult& result);

/// The inverse readers throw SchemaError on malformed input.
ComplexVector complex_vector_from_json(const Json& j);
IndexSet index_set_from_json(const Json& j);

/// Overwrites the fields present in `j`; unknown keys are a schema error.
void apply_solver_overrides(const Json& j, SolverConfig& cfg);

/// A source-localization scenario file, resolved against its array geometry.
struct Scenario {
    SourceModel model;
    std::optional<IndexSet> array;
    IndexSet omega;
    std::optional<IndexSet> compression; ///< empty for the identity
    std::size_t snapshots = 100;
    double snr_db = -5.0;
    std::optional<double> lambda;
    LambdaRule lambda_rule = LambdaRule::NoiseFloor;
    std::uint64_t seed = 1;
    std::size_t grid = 0;
    std::optional<double> peak_threshold;
    std::optional<std::size_t> peak_count;
    bool exact_covariance = false;
    SolverConfig solver;
    Json source; ///< the document as read

    DoaConfig doa_config() const;
};

/// Keys: taus, powers (or amplitudes), n, array {type: cantor | explicit,
/// order | indices, ambient}, omega ("coarray" | "full" | [indices]),
/// compression ("array" | "coarray" | "identity" | [indices]), snapshots,
/// snr_db, lambda, lambda_rule, seed, grid, peak_threshold, peak_count,
/// exact_covariance, solver {...}.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// CSV writers. A non-empty `manifest` adds a leading "# manifest: <path>" line.
void write_estimate_csv(const std::filesystem::path& path, const SourceEstimate& est, const std::string& manifest = {});
void write_dual_csv(const std::filesystem::path& path, std::span<const double> grid, const RealVector& values,
                    const std::string& manifest = {});

} // namespace canm::io
