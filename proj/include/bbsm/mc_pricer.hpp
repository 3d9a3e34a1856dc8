#pragma once

#include <optional>
#include <vector>

#include "bbsm/model.hpp"
#include "bbsm/pricing.hpp"

namespace bbsm {

enum class Convention { Bond, Bank };

struct MixedDeflatorSpec {
    double c = 1.0;  // ratio of the additive to the multiplicative weight
};

/// Optional restart state; the default starts at (a0, 0).
struct StartState {
    double t = 0.0;
    std::optional<double> x;
};

/// Per-path discounted payoffs. The estimate is mean(values) + offset, where
/// offset carries the deterministic accrual term of the bank convention.
struct McSample {
    std::vector<double> values;
    double offset = 0.0;
    PriceResult meta;  // price and std_error left unset
};

PriceResult summarize(const McSample& sample);

struct PairedDifference {
    double mean = 0.0;       // estimate(a) - estimate(b)
    double std_error = 0.0;  // of the per-path differences
    double max_abs = 0.0;    // largest per-path difference, offsets included
};

/// Both samples must come from the same seed and grid.
PairedDifference paired_difference(const McSample& a, const McSample& b);

McSample sample_q1(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& config,
                   const StartState& start = {});
McSample sample_q2_bank(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& config,
                        const StartState& start = {});
McSample sample_dividend(const ParamSchedule& schedule, const OptionSpec& option, Convention convention,
                         const McConfig& config, const StartState& start = {});
McSample sample_mixed_deflator(const ParamSchedule& schedule, const OptionSpec& option,
                               const MixedDeflatorSpec& mix, const McConfig& config);
/// Simulates dA = (rA - c rho) dt + psi dB and prices
/// D2_T g(A_T) + c int D2 rho, taken literally from the combined-deflator
/// martingale. Kept for cross-validation only.
McSample sample_mixed_deflator_direct(const ParamSchedule& schedule, const OptionSpec& option,
                                      const MixedDeflatorSpec& mix, const McConfig& config);

/// E^{Q1}[D1_T g(A_T)] / D1_t.
PriceResult price_q1(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& config);
/// D2_T E^{Q2}[g(A_T)] - int_0^T D2 rho; may be negative.
PriceResult price_q2_bank(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& config);
PriceResult price_dividend(const ParamSchedule& schedule, const OptionSpec& option, Convention convention,
                           const McConfig& config);
/// price_q2_bank with rho replaced by c rho.
PriceResult price_mixed_deflator(const ParamSchedule& schedule, const OptionSpec& option,
                                 const MixedDeflatorSpec& mix, const McConfig& config);
PriceResult price_mixed_deflator_direct(const ParamSchedule& schedule, const OptionSpec& option,
                                        const MixedDeflatorSpec& mix, const McConfig& config);

struct DeltaResult {
    double value = 0.0;
    double std_error = 0.0;
};

/// Central difference in the start price, bump relative to a0, with common
/// random numbers. beta_0 stays at a0.
DeltaResult delta_fd(const ParamSchedule& schedule, const OptionSpec& option, Convention convention,
                     double bump, const McConfig& config);

}  // namespace bbsm
