#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bbsm/model.hpp"

namespace bbsm {

/// Drift used for the Euler scheme; the diffusion is always v + sigma A.
enum class Measure {
    Natural,       // a + mu A
    Q1,            // (chi_t / beta_t) A, bond-unit replication
    Q2,            // r A, bank-account replication
    DividendBond,  // (r - D + rho / beta) A
    DividendBank,  // (r - D) A
    MixedDirect,   // r A - c rho, combined multiplicative/additive deflation
};

enum class Execution { Serial, Parallel };

/// Steps per year used when a request leaves n_steps at 0.
inline constexpr double kDefaultStepsPerYear = 252.0;

/// Runs fail once psi <= 0 occurs on more than this fraction of path-steps.
inline constexpr double kMaxPsiViolationFraction = 1e-3;

struct SimRequest {
    Measure measure = Measure::Q1;
    double t_start = 0.0;
    double t_end = 1.0;
    std::optional<double> x_start;  // defaults to a0
    std::size_t n_steps = 0;        // 0 selects kDefaultStepsPerYear per year
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    double dividend_yield = 0.0;
    double mix_c = 1.0;  // MixedDirect only
    bool keep_paths = false;
    Execution execution = Execution::Parallel;
};

struct PathSet {
    std::vector<double> times;     // n_steps + 1 grid times
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> paths;     // row-major n_paths x (n_steps + 1), only with keep_paths
    std::vector<double> terminal;  // A at the last grid time, one per path
    // Deflators from time 0 evaluated on the grid. The coefficients are
    // deterministic, so these are shared by every path.
    std::vector<double> d1, d2, d3;
    std::uint64_t psi_violations = 0;

    double at(std::size_t path, std::size_t step) const { return paths[path * (n_steps + 1) + step]; }
};

std::size_t default_steps(double horizon) noexcept;

/// Euler-Maruyama paths. The normal variate for (path, step) comes from a
/// counter-based stream keyed on (seed, path, step), so the Serial and
/// Parallel executions are bit-identical.
PathSet simulate_paths(const ParamSchedule& schedule, const SimRequest& request);

}  // namespace bbsm
