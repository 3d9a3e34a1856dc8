#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bbsm/mc_pricer.hpp"
#include "bbsm/model.hpp"

namespace bbsm {

enum class CurveSource { Closed, Mc };

struct CurvePoint {
    double maturity = 0.0;
    double discount = 1.0;
    CurveSource source = CurveSource::Closed;
};

struct ForwardSpec {
    double t = 0.0;
    double t_mat = 1.0;
    double v0 = 0.0;  // contract value at t
};

/// Zero-coupon bond B(t, T) = beta_t / beta_T for deterministic coefficients.
double zcb_price(const ParamSchedule& schedule, double t, double t_mat);

std::vector<CurvePoint> discount_curve(const ParamSchedule& schedule, std::span<const double> maturities);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

/// F(t, T) = (a_t - V) / B(t, T).
double forward_price(const ParamSchedule& schedule, const ForwardSpec& spec, double a_t);
/// Value at s in [t, T] of the contract struck at forward price f: a_s - f B(s, T).
double forward_value(const ParamSchedule& schedule, double f, double s, double t_mat, double a_s);

/// E^{Q1}[A_T | A_t = a_t], simulated from the restart state (a_t, t).
PriceResult futures_price(const ParamSchedule& schedule, double t, double t_mat, double a_t,
                          const McConfig& config);

enum class RateModel { Deterministic, Stochastic };

struct Hedge {
    double asset_units = 0.0;
    double bond_units = 0.0;  // units of the riskless account
};

/// Replicating position for B(t, T): no asset, B(t, T) / beta_t riskless units.
Hedge zcb_hedge(const ParamSchedule& schedule, double t, double t_mat,
                RateModel rates = RateModel::Deterministic);

}  // namespace bbsm
