#include "canm/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "canm/certificate.hpp"
#include "canm/doa.hpp"
#include "canm/error.hpp"
#include "canm/geometry.hpp"
#include "canm/io.hpp"
#include "canm/source_recovery.hpp"

#ifndef CANM_VERSION
#define CANM_VERSION "unknown"
#endif

namespace canm::cli {

namespace fs = std::filesystem;
using io::Json;

std::string version()
{
    return CANM_VERSION;
}

namespace {

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> grid;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config)
{
    auto* cfg = cmd->add_option("--config", o.config, "Scenario file (JSON)");
    if (needs_config) cfg->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--out", o.out, "Output directory for JSON/CSV files and the run manifest");
    cmd->add_option("--grid", o.grid, "Grid size for dual-polynomial sampling and peak search")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "Solver tolerance (sets eps_abs and eps_rel)")->check(CLI::PositiveNumber);
}

/// Collects output files and writes manifest.json next to them.
class Manifest {
public:
    Manifest(std::string command, const CommonOptions& opts)
        : command_(std::move(command)), opts_(opts), started_(utc_now())
    {
        if (!opts_.out.empty()) fs::create_directories(opts_.out);
    }

    bool writes_files() const { return !opts_.out.empty(); }
    std::string manifest_path() const { return (fs::path(opts_.out) / "manifest.json").string(); }

    fs::path output(const std::string& name)
    {
        outputs_.push_back(name);
        return fs::path(opts_.out) / name;
    }

    void write_json(const std::string& name, Json j)
    {
        j["manifest"] = "manifest.json";
        io::write_json(output(name), j);
    }

    void finish(const Json& config, std::optional<std::uint64_t> seed)
    {
        if (!writes_files()) return;
        Json m;
        m["command"] = command_;
        m["config_path"] = opts_.config.empty() ? Json(nullptr) : Json(fs::absolute(opts_.config).string());
        m["config"] = config;
        m["seed"] = seed ? Json(*seed) : Json(nullptr);
        m["version"] = version();
        m["started_at"] = started_;
        m["finished_at"] = utc_now();
        m["outputs"] = outputs_;
        io::write_json(manifest_path(), m);
    }

private:
    std::string command_;
    CommonOptions opts_;
    std::string started_;
    std::vector<std::string> outputs_;
};

void apply_tol(const CommonOptions& o, SolverConfig& cfg)
{
    if (o.tol) {
        cfg.eps_abs = *o.tol;
        cfg.eps_rel = *o.tol;
    }
}

int cmd_cantor(unsigned order, const CommonOptions& opts)
{
    const IndexSet j = cantor_array(order);
    const bool complete = is_complete(j);
    std::cout << "order " << order << ": " << j.size() << " elements, aperture " << j.ambient()
              << ", complete=" << (complete ? "true" : "false") << "\nindices:";
    for (auto v : j) std::cout << ' ' << v;
    std::cout << '\n';

    Manifest manifest("cantor", opts);
    if (manifest.writes_files()) {
        manifest.write_json("cantor.json", {{"order", order},
                                            {"elements", j.size()},
                                            {"aperture", j.ambient()},
                                            {"complete", complete},
                                            {"indices", j.indices()}});
        manifest.finish({{"order", order}}, std::nullopt);
    }
    return kSuccess;
}

int cmd_certify(const CommonOptions& opts)
{
    const io::Scenario sc = io::load_scenario(opts.config);
    const IndexSet compression = sc.compression ? *sc.compression : IndexSet::full(sc.model.aperture);
    const RecoveryCertification cert =
        certify(sc.model.taus, sc.model.powers, compression, sc.omega, sc.model.aperture, opts.grid.value_or(0));

    Json report = io::to_json(cert);
    std::cout << (cert.certified ? "certified" : "not certified");
    if (!cert.certified) std::cout << ": " << cert.reason;
    std::cout << '\n';
    if (!cert.hypotheses.missing_lags.empty()) {
        std::cout << "missing lags:";
        for (auto lag : cert.hypotheses.missing_lags) std::cout << ' ' << lag;
        std::cout << '\n';
    }

    Manifest manifest("certify", opts);
    if (manifest.writes_files()) {
        manifest.write_json("certificate.json", report);
        manifest.finish(sc.source, opts.seed);
    } else {
        std::cout << report.dump(2) << '\n';
    }
    return cert.certified ? kSuccess : kDomainFailure;
}

std::optional<IndexSet> compression_override(const std::string& name, const io::Scenario& sc)
{
    if (name == "identity") return std::nullopt;
    if (!sc.array) throw SchemaError("--compression " + name + " needs an 'array' in the scenario");
    return *sc.array;
}

int cmd_recover(const CommonOptions& opts, const std::string& compression)
{
    const io::Scenario sc = io::load_scenario(opts.config);
    ProblemSpec spec;
    spec.n = sc.model.aperture;
    spec.omega = sc.omega;
    spec.observed = SelectionOperator(sc.omega).apply(sc.model.signal());
    spec.compression = compression.empty() ? sc.compression : compression_override(compression, sc);
    if (sc.lambda) {
        spec.mode = ProgramMode::Denoise;
        spec.lambda = *sc.lambda;
    }
    SolverConfig cfg = sc.solver;
    apply_tol(opts, cfg);

    const SdpSolution sol = solve(spec, cfg);
    const ComplexVector truth = sc.model.signal();
    const double rel_error = (sol.x_hat - truth).norm() / truth.norm();

    Json report;
    report["solution"] = io::to_json(sol);
    report["relative_error"] = rel_error;
    int code = sol.converged() ? kSuccess : kDomainFailure;
    std::string summary;
    SourceEstimate est;
    try {
        est = vandermonde_decompose(sol.x_hat);
        const MatchReport match = match_sources(est, sc.model);
        report["estimate"] = io::to_json(est);
        report["match"] = io::to_json(match);
        const bool exact = spec.mode == ProgramMode::ExactEquality;
        if (exact && (!match.missed.empty() || !match.spurious.empty() || match.max_error > 1e-4)) code = kDomainFailure;
        std::ostringstream os;
        os << est.count() << " sources, max error " << match.max_error;
        summary = os.str();
    } catch (const NotPsdError& e) {
        report["estimate"] = nullptr;
        report["extraction_error"] = e.what();
        summary = std::string("extraction failed: ") + e.what();
        code = kDomainFailure;
    }
    std::cout << to_string(sol.status) << " in " << sol.iterations << " iterations (" << sol.wall_time_seconds
              << " s), relative error " << rel_error << ", " << summary << '\n';

    Manifest manifest("recover", opts);
    if (manifest.writes_files()) {
        const std::string mpath = "manifest.json";
        manifest.write_json("recover.json", report);
        io::write_estimate_csv(manifest.output("estimate.csv"), est, mpath);
        const std::vector<double> grid = uniform_grid(opts.grid.value_or(16 * spec.n));
        const RealVector values = dual_polynomial(sol).polynomial.evaluate(grid).real();
        io::write_dual_csv(manifest.output("dual.csv"), grid, values, mpath);
        Json config = sc.source;
        if (!compression.empty()) config["compression_override"] = compression;
        manifest.finish(config, opts.seed);
    } else {
        report["solution"].erase("s_hat");
        std::cout << report.dump(2) << '\n';
    }
    return code;
}

int cmd_doa(const CommonOptions& opts)
{
    const io::Scenario sc = io::load_scenario(opts.config);
    if (!sc.array) throw SchemaError("doa needs an 'array' in the scenario");
    DoaConfig cfg = sc.doa_config();
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.grid) cfg.grid_size = *opts.grid;
    apply_tol(opts, cfg.solver);

    const DoaResult res = run_doa(sc.model, *sc.array, cfg);
    const double tolerance = 0.5 / static_cast<double>(sc.model.aperture);
    const MatchReport match = match_sources(res.estimate, sc.model, tolerance);

    Json report = io::to_json(res);
    report["seed"] = cfg.seed;
    report["match"] = io::to_json(match);
    report["match_tolerance"] = tolerance;
    std::cout << to_string(res.solution.status) << ", " << res.estimate.count() << " peaks, " << match.matches.size()
              << " of " << sc.model.count() << " sources within " << tolerance << '\n';

    Manifest manifest("doa", opts);
    if (manifest.writes_files()) {
        const std::string mpath = "manifest.json";
        manifest.write_json("doa.json", report);
        io::write_estimate_csv(manifest.output("estimate.csv"), res.estimate, mpath);
        io::write_dual_csv(manifest.output("dual.csv"), res.dual_grid, res.dual_values, mpath);
        manifest.finish(sc.source, cfg.seed);
    } else {
        std::cout << report.dump(2) << '\n';
    }
    return res.solution.converged() ? kSuccess : kDomainFailure;
}

int cmd_bench(const CommonOptions& opts, std::vector<unsigned> orders, std::size_t sources, std::size_t trials)
{
    for (unsigned k : orders) {
        if (k < 1 || k > 7) throw SchemaError("bench orders must lie in 1..7");
    }
    if (trials < 1) throw SchemaError("bench needs at least one trial");
    SolverConfig cfg;
    apply_tol(opts, cfg);
    const std::uint64_t seed = opts.seed.value_or(1);
    const std::vector<BenchCell> cells = run_bench(orders, sources, trials, seed, cfg);
    const std::string csv = bench_csv(cells);

    Manifest manifest("bench", opts);
    if (manifest.writes_files()) {
        std::ofstream out(manifest.output("bench.csv"));
        out << "# manifest: manifest.json\n" << csv;
        manifest.finish({{"orders", orders}, {"p", sources}, {"trials", trials}, {"solver", io::to_json(cfg)}}, seed);
    }
    std::cout << csv;
    std::size_t failures = 0;
    for (const auto& c : cells) failures += c.anm_nonconverged + c.canm_nonconverged;
    return failures == 0 ? kSuccess : kDomainFailure;
}

std::vector<double> draw_taus(std::mt19937_64& rng, std::size_t count)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> taus;
    while (taus.size() < count) {
        const double t = u(rng);
        bool distinct = true;
        for (double s : taus) distinct = distinct && circle_distance(s, t) > 1e-9;
        if (distinct) taus.push_back(t);
    }
    return taus;
}

} // namespace

std::vector<BenchCell> run_bench(std::span<const unsigned> orders, std::size_t sources, std::size_t trials,
                                 std::uint64_t seed, const SolverConfig& config)
{
    using clock = std::chrono::steady_clock;
    std::vector<BenchCell> cells;
    for (unsigned order : orders) {
        const IndexSet array = cantor_array(order);
        BenchCell cell;
        cell.order = order;
        cell.aperture = array.ambient();
        cell.elements = array.size();
        cell.trials = trials;
        for (std::size_t t = 0; t < trials; ++t) {
            std::seed_seq seq{seed, static_cast<std::uint64_t>(order), static_cast<std::uint64_t>(t)};
            std::mt19937_64 rng(seq);
            const std::vector<double> taus = draw_taus(rng, sources);
            const std::vector<double> powers(sources, 1.0);

            ProblemSpec spec;
            spec.n = array.ambient();
            spec.omega = difference_set(array);
            spec.observed = SelectionOperator(spec.omega).apply(synthesize(taus, powers, static_cast<Index>(spec.n)));

            auto start = clock::now();
            const SdpSolution anm = solve(spec, config);
            cell.mean_anm_seconds += std::chrono::duration<double>(clock::now() - start).count();
            if (!anm.converged()) ++cell.anm_nonconverged;

            spec.compression = array;
            start = clock::now();
            const SdpSolution canm = solve(spec, config);
            cell.mean_canm_seconds += std::chrono::duration<double>(clock::now() - start).count();
            if (!canm.converged()) ++cell.canm_nonconverged;
        }
        cell.mean_anm_seconds /= static_cast<double>(trials);
        cell.mean_canm_seconds /= static_cast<double>(trials);
        cells.push_back(cell);
    }
    return cells;
}

std::string bench_csv(const std::vector<BenchCell>& cells)
{
    std::ostringstream os;
    os << "order,aperture,elements,trials,mean_anm_seconds,mean_canm_seconds,speedup,anm_nonconverged,canm_nonconverged\n";
    os.precision(6);
    for (const auto& c : cells) {
        os << c.order << ',' << c.aperture << ',' << c.elements << ',' << c.trials << ',' << c.mean_anm_seconds << ','
           << c.mean_canm_seconds << ',' << c.speedup() << ',' << c.anm_nonconverged << ',' << c.canm_nonconverged
           << '\n';
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Compressed positive atomic norm minimization toolkit", "canm"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1, 1);

    CommonOptions opts;
    unsigned order = 0;
    std::string compression;
    std::vector<unsigned> orders{3, 4, 5, 6};
    std::size_t sources = 8;
    std::size_t trials = 10;

    auto* cantor = app.add_subcommand("cantor", "Print a Cantor array and check its co-array");
    cantor->add_option("--order", order, "Fractal order k >= 1")->required();
    add_common(cantor, opts, false);

    auto* certify_cmd = app.add_subcommand("certify", "Check the exact-recovery hypotheses and build the dual certificate");
    add_common(certify_cmd, opts, true);

    auto* recover = app.add_subcommand("recover", "Solve the (compressed) program on exact samples and extract sources");
    add_common(recover, opts, true);
    recover->add_option("--compression", compression, "Override the compression: identity, array or coarray")
        ->check(CLI::IsMember({"identity", "array", "coarray"}));

    auto* doa = app.add_subcommand("doa", "Simulate snapshots and localize sources from the co-array");
    add_common(doa, opts, true);

    auto* bench = app.add_subcommand("bench", "Time the identity and compressed programs on Cantor arrays");
    add_common(bench, opts, false);
    bench->add_option("--orders", orders, "Cantor orders")->delimiter(',');
    bench->add_option("--p", sources, "Sources per trial")->check(CLI::PositiveNumber);
    bench->add_option("--trials", trials, "Trials per order")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (cantor->parsed()) return cmd_cantor(order, opts);
        if (certify_cmd->parsed()) return cmd_certify(opts);
        if (recover->parsed()) return cmd_recover(opts, compression);
        if (doa->parsed()) return cmd_doa(opts);
        if (bench->parsed()) return cmd_bench(opts, orders, sources, trials);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainFailure;
    }
    return kUsageError;
}

int run_cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"canm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace canm::cli
