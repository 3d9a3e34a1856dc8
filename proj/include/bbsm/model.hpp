#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bbsm {

/// Below these magnitudes r and rho are treated through their series limits.
inline constexpr double kRateEpsilon = 1e-9;
inline constexpr double kRhoEpsilon = 1e-9;

/// Coefficients of the unified diffusion
///   dA = (a + mu A) dt + (v + sigma A) dW,   d(beta) = (rho + r beta) dt,
/// with the common numeraire beta_0 = A_0 = a0.
struct ModelParams {
    double a = 0.0;      // drift offset, price/year
    double mu = 0.0;     // proportional drift, 1/year
    double v = 0.0;      // volatility offset, price/sqrt(year)
    double sigma = 0.0;  // proportional volatility, 1/sqrt(year)
    double rho = 0.0;    // riskless accrual offset, price/year
    double r = 0.0;      // riskless proportional rate, 1/year
    double a0 = 100.0;   // initial asset price (and beta_0)

    double beta0() const noexcept { return a0; }
    double phi(double x) const noexcept { return a + mu * x; }
    double psi(double x) const noexcept { return v + sigma * x; }
    double chi(double beta) const noexcept { return rho + r * beta; }

    /// Throws InvalidArgument unless v >= 0, sigma >= 0, v + sigma > 0, a0 > 0
    /// and every coefficient is finite.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Deterministic piecewise-constant coefficients. Interval i covers
/// [breakpoints[i], breakpoints[i+1]); the last interval is open-ended.
/// The initial price is taken from the first interval.
class ParamSchedule {
public:
    ParamSchedule(const ModelParams& constant);  // NOLINT(google-explicit-constructor)
    ParamSchedule(std::vector<double> breakpoints, std::vector<ModelParams> params);

    const ModelParams& at(double t) const noexcept { return params_[interval(t)]; }
    std::size_t interval(double t) const noexcept;
    std::size_t size() const noexcept { return params_.size(); }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const ModelParams> params() const noexcept { return params_; }
    bool is_constant() const noexcept { return params_.size() == 1; }
    double a0() const noexcept { return params_.front().a0; }

    /// Copy with every interval's rho multiplied by c.
    ParamSchedule with_scaled_rho(double c) const;

private:
    std::vector<double> breakpoints_;
    std::vector<ModelParams> params_;
};

/// expm1(x) / x, continuous at 0.
double expm1_ratio(double x) noexcept;

/// Riskless account value beta_t; throws NonPositiveRiskless if beta fails to
/// stay positive on [0, t].
double riskless_beta(const ParamSchedule& schedule, double t);

struct Deflators {
    double d1 = 1.0;  // exp(-int chi/beta)
    double d2 = 1.0;  // exp(-int r)
    double d3 = 1.0;  // exp(-int rho/beta)
};

Deflators deflators(const ParamSchedule& schedule, double t);

/// (phi - chi) / psi at the state (a_t, beta_t).
double market_price_of_risk(const ModelParams& params, double a_t, double beta_t);

/// Same check against the coefficients in force at time t.
void check_no_arbitrage(const ParamSchedule& schedule, double t, double a_t);

struct RisklessHorizon {
    double time;      // first time beta reaches 0 (infinity if never)
    bool restricted;  // hit happens in an r > 0, rho < 0, beta < |rho|/r interval
};

RisklessHorizon riskless_horizon(const ParamSchedule& schedule);

/// Largest admissible maturity T <= (1/r) ln((|rho|/r) / (|rho|/r - a0)) for
/// r > 0, rho < 0, a0 < |rho|/r; nullopt outside that regime.
std::optional<double> maturity_bound(const ModelParams& params);

/// Throws MaturityRestriction when t_mat exceeds the restricted-regime bound,
/// NonPositiveRiskless when beta otherwise reaches 0 by t_mat.
void check_maturity(const ParamSchedule& schedule, double t_mat);

/// int_{t0}^{t1} D2_s rho_s ds, the bank-account accrual term.
double bank_accrual(const ParamSchedule& schedule, double t0, double t1);

// Flat key-value configuration ("key = value", '#' comments).
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::string_view text);

/// Consumes the model keys a, mu, v, sigma, rho, r, a0 from `values`.
/// a0 is required; the rest default to 0.
ModelParams model_from_key_values(KeyValues& values);

/// Strict parse: any key other than the seven model keys is an InputError.
ModelParams parse_model_config(std::string_view text);
ModelParams load_model_config(const std::string& path);
std::string to_config(const ModelParams& params);

double parse_double(std::string_view text, std::string_view what);

}  // namespace bbsm
