#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bbsm/binomial.hpp"
#include "bbsm/pricing.hpp"

namespace bbsm {

inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr std::size_t kDefaultWindow = 10;

/// Observed prices at ascending times measured in trading days.
struct PriceSeries {
    std::vector<double> times;
    std::vector<double> prices;

    void validate() const;
    static PriceSeries daily(std::vector<double> prices);
};

struct Quote {
    double maturity = 1.0;  // years
    double strike = 100.0;
    double price = 0.0;
    OptionKind kind = OptionKind::Call;
};

struct QuoteSheet {
    std::vector<Quote> quotes;
    double t = 0.0;
    double a0 = 100.0;
};

struct CalibResult {
    std::vector<std::string> names;
    std::vector<double> values;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool constraint_active = false;

    double value(const std::string& name) const;
};

/// Rolling windows of tau changes: mean change per year regressed on the
/// price at the start of each window. Returns (a, mu).
CalibResult calibrate_drift(const PriceSeries& series, std::size_t window = kDefaultWindow);

/// Window standard deviation of changes per sqrt(year) regressed on the
/// window-start price with v >= 0, sigma >= 0. Returns (v, sigma).
CalibResult calibrate_vol(const PriceSeries& series, std::size_t window = kDefaultWindow);

/// Share of positive lag-1 changes, zero changes counted half, clipped to
/// [1/m, 1 - 1/m] for m changes.
double estimate_pn(const PriceSeries& series);

struct FixedCoefficients {
    double a = 0.0;
    double mu = 0.0;
    double v = 0.0;
    double sigma = 0.0;
    double p_n = 0.5;
};

struct RisklessOptions {
    std::size_t tree_n = 12;
    TreeMode mode = TreeMode::Auto;
    std::size_t bucket_points = 257;
    std::size_t max_iterations = 4000;  // per simplex run
    double penalty = 1e6;
};

/// Fits (rho, r) so that tree prices match the quotes in sum of squared
/// relative errors, with a penalty on rho + r beta_0 >= a + mu a0.
CalibResult calibrate_riskless(const QuoteSheet& sheet, const FixedCoefficients& fixed,
                               const RisklessOptions& options = {});

/// Objective used by calibrate_riskless, exposed for diagnostics.
double riskless_objective(const QuoteSheet& sheet, const FixedCoefficients& fixed, const RisklessOptions& options,
                          double rho, double r);

struct EsgInput {
    double s = 100.0;
    double z_company = 50.0;
    double z_index = 50.0;
    double gamma_esg = 0.0;
};

/// s (1 + gamma (z_company - z_index) / z_index); may be negative.
double esg_adjust(const EsgInput& input);

}  // namespace bbsm
