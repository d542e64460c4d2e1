#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "canm/sdp_solver.hpp"

namespace canm::cli {

enum ExitCode : int { kSuccess = 0, kDomainFailure = 1, kUsageError = 2 };

/// Mean solve() wall times for one Cantor order.
struct BenchCell {
    unsigned order = 0;
    std::size_t aperture = 0;
    std::size_t elements = 0;
    std::size_t trials = 0;
    double mean_anm_seconds = 0.0;
    double mean_canm_seconds = 0.0;
    std::size_t anm_nonconverged = 0;
    std::size_t canm_nonconverged = 0;

    double speedup() const { return mean_canm_seconds > 0.0 ? mean_anm_seconds / mean_canm_seconds : 0.0; }
};

/// Times the identity and the array-compressed exact programs on noiseless
/// co-array samples of `sources` unit-power sources per trial.
std::vector<BenchCell> run_bench(std::span<const unsigned> orders, std::size_t sources, std::size_t trials,
                                 std::uint64_t seed, const SolverConfig& config = {});

/// Header and rows as written by the bench command.
std::string bench_csv(const std::vector<BenchCell>& cells);

/// Entry point of the command-line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

std::string version();

} // namespace canm::cli
