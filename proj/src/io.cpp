#include "canm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

#include "canm/error.hpp"

namespace canm::io {

namespace {

Json pair(Complex c)
{
    return Json::array({c.real(), c.imag()});
}

Json checks_json(const std::vector<CertificateCheck>& checks)
{
    Json out = Json::array();
    for (const auto& c : checks) out.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}});
    return out;
}

std::string method_name(ExtractionMethod m)
{
    switch (m) {
    case ExtractionMethod::PeakPicking: return "peak_picking";
    case ExtractionMethod::Vandermonde: return "vandermonde";
    case ExtractionMethod::AtomicFit: return "atomic_fit";
    }
    return "unknown";
}

[[noreturn]] void schema(const std::string& what)
{
    throw SchemaError("scenario: " + what);
}

template <typename T>
T read(const Json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        schema(std::string("field '") + key + "' is missing or has the wrong type");
    }
}

std::vector<double> read_reals(const Json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array()) schema(std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) schema(std::string("'") + key + "' must contain numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<IndexSet::value_type> read_indices(const Json& j, const char* what)
{
    if (!j.is_array()) schema(std::string(what) + " must be an array of nonnegative integers");
    std::vector<IndexSet::value_type> out;
    for (const auto& v : j) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            schema(std::string(what) + " must contain nonnegative integers only");
        }
        out.push_back(v.get<IndexSet::value_type>());
    }
    return out;
}

} // namespace

Json to_json(const ComplexVector& v)
{
    Json out = Json::array();
    for (Index k = 0; k < v.size(); ++k) out.push_back(pair(v[k]));
    return out;
}

Json to_json(const HermitianMatrix& m)
{
    Json out = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(pair(m(r, c)));
        out.push_back(row);
    }
    return out;
}

Json to_json(const IndexSet& set)
{
    return {{"indices", set.indices()}, {"ambient", set.ambient()}};
}

Json to_json(const SolverConfig& cfg)
{
    return {{"rho", cfg.rho},
            {"max_iters", cfg.max_iters},
            {"eps_abs", cfg.eps_abs},
            {"eps_rel", cfg.eps_rel},
            {"over_relaxation", cfg.over_relaxation},
            {"adaptive_rho", cfg.adaptive_rho},
            {"record_history", cfg.record_history},
            {"dual_rank_tol", cfg.dual_rank_tol},
            {"completion_threshold_exact", cfg.completion_threshold_exact},
            {"completion_threshold_denoise", cfg.completion_threshold_denoise}};
}

Json to_json(const ProblemSpec& spec)
{
    Json out = {{"n", spec.n},
                {"omega", to_json(spec.omega)},
                {"observed", to_json(spec.observed)},
                {"compression", spec.compression ? to_json(*spec.compression) : Json("identity")},
                {"mode", spec.mode == ProgramMode::ExactEquality ? "exact" : "denoise"}};
    if (spec.mode == ProgramMode::Denoise) out["lambda"] = spec.lambda;
    return out;
}

Json to_json(const SdpSolution& sol, bool include_history)
{
    Json out = {{"status", to_string(sol.status)},
                {"mode", sol.mode == ProgramMode::ExactEquality ? "exact" : "denoise"},
                {"lambda", sol.lambda},
                {"objective", sol.objective},
                {"dual_objective", sol.dual_objective},
                {"duality_gap", sol.duality_gap()},
                {"primal_residual", sol.primal_residual},
                {"dual_residual", sol.dual_residual},
                {"q_off_support", sol.q_off_support},
                {"iterations", sol.iterations},
                {"rho", sol.rho},
                {"wall_time_seconds", sol.wall_time_seconds},
                {"dual_source", to_string(sol.dual_source)},
                {"compression", to_json(sol.compression)},
                {"omega", to_json(sol.omega)},
                {"free_coordinates", sol.free_coordinates.indices()},
                {"completion_residual", sol.completion_residual},
                {"x_hat", to_json(sol.x_hat)},
                {"q_hat", to_json(sol.q_hat)},
                {"s_hat", to_json(sol.s_hat)}};
    if (include_history) {
        Json h = Json::array();
        for (const auto& s : sol.history) {
            h.push_back({{"iteration", s.iteration}, {"primal", s.primal}, {"dual", s.dual}, {"rho", s.rho}});
        }
        out["history"] = h;
    }
    return out;
}

Json to_json(const CompressionReport& report)
{
    Json conds = Json::array();
    for (const auto& c : report.conditions) conds.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"all_passed", report.all_passed()}, {"conditions", conds}, {"missing_lags", report.missing_lags}};
}

Json to_json(const CertificateReport& report)
{
    return {{"all_passed", report.all_passed()},
            {"checks", checks_json(report.checks())},
            {"min_gap", report.min_gap},
            {"grid_size", report.grid_size}};
}

Json to_json(const Certificate& cert)
{
    return {{"compression", to_json(cert.compression)},
            {"u", to_json(cert.u)},
            {"p", to_json(cert.p)},
            {"q", to_json(cert.q)},
            {"grid_size", cert.grid_size},
            {"report", to_json(cert.report)}};
}

Json to_json(const RecoveryCertification& cert)
{
    Json out = {{"certified", cert.certified}, {"reason", cert.reason}, {"hypotheses", to_json(cert.hypotheses)}};
    out["certificate"] = cert.certificate ? to_json(*cert.certificate) : Json(nullptr);
    return out;
}

Json to_json(const SourceEstimate& est)
{
    return {{"method", method_name(est.method)},
            {"count", est.count()},
            {"taus", est.taus},
            {"amplitudes", est.amplitudes},
            {"residual", est.residual},
            {"clamped", est.clamped}};
}

Json to_json(const MatchReport& report)
{
    Json matches = Json::array();
    for (const auto& m : report.matches) {
        matches.push_back({{"truth", m.truth_index}, {"estimate", m.estimate_index}, {"error", m.error}});
    }
    return {{"matches", matches},
            {"missed", report.missed},
            {"spurious", report.spurious},
            {"max_error", report.max_error},
            {"median_error", report.median_error}};
}

Json to_json(const CrossValidationReport& r)
{
    return {{"passed", r.passed()},
            {"objective_identity", r.objective_identity},
            {"objective_compressed", r.objective_compressed},
            {"objective_grid", r.objective_grid},
            {"objective_truth", r.objective_truth},
            {"max_objective_gap", r.max_objective_gap},
            {"support_distance", r.support_distance},
            {"grid_cell", r.grid_cell},
            {"solvers_converged", r.solvers_converged},
            {"certificate_available", r.certificate_available},
            {"certified", r.certified},
            {"grid_feasible", r.grid_feasible},
            {"solver_taus", r.solver_taus},
            {"grid_support", r.grid_support},
            {"differences", r.differences}};
}

Json to_json(const DoaResult& r)
{
    Json out = {{"estimate", to_json(r.estimate)},
                {"sigma2", r.sigma2},
                {"snr_db", r.snr_db},
                {"lambda", r.lambda},
                {"lambda_rule", to_string(r.lambda_rule)},
                {"grid_size", r.grid_size},
                {"guaranteed", r.guaranteed},
                {"omega", to_json(r.observation.omega)},
                {"coarray", to_json(r.observation.y)},
                {"weights", r.observation.weights},
                {"solver",
                 {{"status", to_string(r.solution.status)},
                  {"objective", r.solution.objective},
                  {"dual_objective", r.solution.dual_objective},
                  {"iterations", r.solution.iterations},
                  {"wall_time_seconds", r.solution.wall_time_seconds},
                  {"compression", r.problem.compression ? to_json(*r.problem.compression) : Json("identity")}}}};
    if (r.peak_count) {
        out["peak_rule"] = {{"strongest", *r.peak_count}};
    } else {
        out["peak_rule"] = {{"threshold", r.peak_threshold}};
    }
    return out;
}

ComplexVector complex_vector_from_json(const Json& j)
{
    if (!j.is_array()) throw SchemaError("complex vector must be an array of [re, im] pairs");
    ComplexVector v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const Json& e = j[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw SchemaError("complex vector entry " + std::to_string(k) + " is not an [re, im] pair");
        }
        v[static_cast<Index>(k)] = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

IndexSet index_set_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("indices") || !j.contains("ambient")) {
        throw SchemaError("index set must be an object with 'indices' and 'ambient'");
    }
    try {
        return IndexSet(read_indices(j.at("indices"), "indices"), j.at("ambient").get<std::size_t>());
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
}

void apply_solver_overrides(const Json& j, SolverConfig& cfg)
{
    if (!j.is_object()) throw SchemaError("solver overrides must be an object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "rho") cfg.rho = value.get<double>();
            else if (key == "max_iters") cfg.max_iters = value.get<int>();
            else if (key == "eps_abs") cfg.eps_abs = value.get<double>();
            else if (key == "eps_rel") cfg.eps_rel = value.get<double>();
            else if (key == "over_relaxation") cfg.over_relaxation = value.get<double>();
            else if (key == "adaptive_rho") cfg.adaptive_rho = value.get<bool>();
            else if (key == "record_history") cfg.record_history = value.get<bool>();
            else if (key == "dual_rank_tol") cfg.dual_rank_tol = value.get<double>();
            else if (key == "completion_threshold_exact") cfg.completion_threshold_exact = value.get<double>();
            else if (key == "completion_threshold_denoise") cfg.completion_threshold_denoise = value.get<double>();
            else throw SchemaError("unknown solver option '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("solver overrides: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
}

DoaConfig Scenario::doa_config() const
{
    DoaConfig c;
    c.snapshots = snapshots;
    c.snr_db = snr_db;
    c.lambda = lambda;
    c.lambda_rule = lambda_rule;
    c.compress = compression.has_value();
    c.solver = solver;
    c.grid_size = grid;
    if (peak_threshold) c.peak_threshold = *peak_threshold;
    c.peak_count = peak_count;
    c.seed = seed;
    c.exact_covariance = exact_covariance;
    return c;
}

Scenario parse_scenario(const Json& j)
{
    static const std::set<std::string> known = {
        "taus", "powers", "amplitudes", "n", "array", "omega", "compression", "snapshots", "L", "snr_db", "lambda",
        "lambda_rule", "seed", "grid", "peak_threshold", "peak_count", "exact_covariance", "solver", "description"};
    if (!j.is_object()) schema("document must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) schema("unknown field '" + key + "'");
    }

    Scenario sc;
    sc.source = j;
    sc.model.taus = read_reals(j, "taus");
    if (j.contains("powers") && j.contains("amplitudes")) schema("give either 'powers' or 'amplitudes', not both");
    if (j.contains("powers")) {
        sc.model.powers = read_reals(j, "powers");
    } else if (j.contains("amplitudes")) {
        sc.model.powers = read_reals(j, "amplitudes");
    } else {
        sc.model.powers.assign(sc.model.taus.size(), 1.0);
    }
    if (sc.model.powers.size() != sc.model.taus.size()) schema("'taus' and 'powers' differ in length");

    if (j.contains("array")) {
        const Json& a = j.at("array");
        if (!a.is_object()) schema("'array' must be an object");
        const auto type = read<std::string>(a, "type");
        try {
            if (type == "cantor") {
                sc.array = cantor_array(read<unsigned>(a, "order"));
            } else if (type == "explicit") {
                auto idx = read_indices(a.contains("indices") ? a.at("indices") : Json(), "array.indices");
                if (idx.empty()) schema("array.indices must not be empty");
                std::size_t ambient = 0;
                for (auto v : idx) ambient = std::max<std::size_t>(ambient, v + 1);
                if (a.contains("ambient")) ambient = read<std::size_t>(a, "ambient");
                sc.array = IndexSet::from_unsorted(std::move(idx), ambient);
            } else {
                schema("array.type must be 'cantor' or 'explicit'");
            }
        } catch (const DomainError& e) {
            schema(e.what());
        } catch (const CapacityError& e) {
            schema(e.what());
        }
    }

    std::size_t n = 0;
    if (j.contains("n")) n = read<std::size_t>(j, "n");
    if (sc.array) {
        if (n != 0 && n != sc.array->ambient()) schema("'n' disagrees with the array aperture");
        n = sc.array->ambient();
    }
    if (n == 0) schema("aperture unknown: give 'n' or an 'array'");
    sc.model.aperture = n;

    auto resolve = [&](const Json& spec, const char* what) -> std::optional<IndexSet> {
        if (spec.is_string()) {
            const auto s = spec.get<std::string>();
            if (s == "full") return IndexSet::full(n);
            if (s == "identity") return std::nullopt;
            if (s == "coarray" || s == "array") {
                if (!sc.array) schema(std::string(what) + " '" + s + "' needs an 'array'");
                return std::string(what) == "omega" ? difference_set(*sc.array) : *sc.array;
            }
            schema(std::string(what) + ": unknown value '" + s + "'");
        }
        try {
            return IndexSet::from_unsorted(read_indices(spec, what), n);
        } catch (const DomainError& e) {
            schema(std::string(what) + ": " + e.what());
        }
    };

    const Json omega_spec = j.contains("omega") ? j.at("omega") : Json(sc.array ? "coarray" : "full");
    if (omega_spec.is_string() && omega_spec.get<std::string>() == "identity") schema("omega cannot be 'identity'");
    if (omega_spec.is_string() && omega_spec.get<std::string>() == "array") schema("omega must be 'coarray', 'full' or a list");
    sc.omega = *resolve(omega_spec, "omega");
    const Json comp_spec = j.contains("compression") ? j.at("compression") : Json(sc.array ? "array" : "identity");
    sc.compression = resolve(comp_spec, "compression");

    if (j.contains("snapshots") && j.contains("L")) schema("give either 'snapshots' or 'L', not both");
    if (j.contains("snapshots")) sc.snapshots = read<std::size_t>(j, "snapshots");
    if (j.contains("L")) sc.snapshots = read<std::size_t>(j, "L");
    if (sc.snapshots < 1) schema("snapshots must be at least 1");
    if (j.contains("snr_db")) sc.snr_db = read<double>(j, "snr_db");
    if (j.contains("lambda")) {
        sc.lambda = read<double>(j, "lambda");
        if (!(*sc.lambda >= 0.0)) schema("lambda must be nonnegative");
    }
    if (j.contains("lambda_rule")) {
        const auto rule = read<std::string>(j, "lambda_rule");
        if (rule == "noise_floor") sc.lambda_rule = LambdaRule::NoiseFloor;
        else if (rule == "covariance_scale") sc.lambda_rule = LambdaRule::CovarianceScale;
        else schema("lambda_rule must be 'noise_floor' or 'covariance_scale'");
    }
    if (j.contains("seed")) sc.seed = read<std::uint64_t>(j, "seed");
    if (j.contains("grid")) sc.grid = read<std::size_t>(j, "grid");
    if (j.contains("peak_threshold")) sc.peak_threshold = read<double>(j, "peak_threshold");
    if (j.contains("peak_count")) sc.peak_count = read<std::size_t>(j, "peak_count");
    if (j.contains("exact_covariance")) sc.exact_covariance = read<bool>(j, "exact_covariance");
    if (j.contains("solver")) apply_solver_overrides(j.at("solver"), sc.solver);

    try {
        sc.model.validate();
    } catch (const DomainError& e) {
        schema(e.what());
    }
    return sc;
}

Json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path)
{
    return parse_scenario(read_json(path));
}

void write_json(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void write_estimate_csv(const std::filesystem::path& path, const SourceEstimate& est, const std::string& manifest)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (!manifest.empty()) out << "# manifest: " << manifest << '\n';
    out << "tau,amplitude\n" << std::setprecision(17);
    for (std::size_t k = 0; k < est.count(); ++k) out << est.taus[k] << ',' << est.amplitudes[k] << '\n';
}

void write_dual_csv(const std::filesystem::path& path, std::span<const double> grid, const RealVector& values,
                    const std::string& manifest)
{
    if (static_cast<Index>(grid.size()) != values.size()) throw ShapeError("write_dual_csv: grid and values differ in length");
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (!manifest.empty()) out << "# manifest: " << manifest << '\n';
    out << "tau,re_q\n" << std::setprecision(17);
    for (std::size_t k = 0; k < grid.size(); ++k) out << grid[k] << ',' << values[static_cast<Index>(k)] << '\n';
}

} // namespace canm::io
