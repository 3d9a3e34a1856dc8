#include "bbsm/term_structure.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "bbsm/error.hpp"
#include "stats.hpp"

namespace bbsm {

double zcb_price(const ParamSchedule& schedule, double t, double t_mat) {
    require(0.0 <= t && t <= t_mat && std::isfinite(t_mat), ErrorCode::InvalidArgument, "need 0 <= t <= T");
    check_maturity(schedule, t_mat);
    if (t == t_mat) return 1.0;
    return deflators(schedule, t_mat).d1 / deflators(schedule, t).d1;
}

std::vector<CurvePoint> discount_curve(const ParamSchedule& schedule, std::span<const double> maturities) {
    std::vector<CurvePoint> curve;
    curve.reserve(maturities.size());
    for (double t_mat : maturities) curve.push_back({t_mat, zcb_price(schedule, 0.0, t_mat), CurveSource::Closed});
    return curve;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "maturity,discount\n";
    char line[80];
    for (const auto& point : curve) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", point.maturity, point.discount);
        out << line;
    }
}

double forward_price(const ParamSchedule& schedule, const ForwardSpec& spec, double a_t) {
    require(std::isfinite(a_t) && std::isfinite(spec.v0), ErrorCode::InvalidArgument, "inputs must be finite");
    const double b = zcb_price(schedule, spec.t, spec.t_mat);
    require(b > 0.0, ErrorCode::NonPositiveRiskless, "bond price must be > 0");
    return (a_t - spec.v0) / b;
}

double forward_value(const ParamSchedule& schedule, double f, double s, double t_mat, double a_s) {
    return a_s - f * zcb_price(schedule, s, t_mat);
}

PriceResult futures_price(const ParamSchedule& schedule, double t, double t_mat, double a_t,
                          const McConfig& config) {
    require(0.0 <= t && t <= t_mat, ErrorCode::InvalidArgument, "need 0 <= t <= T");
    check_maturity(schedule, t_mat);
    if (t == t_mat) {
        PriceResult out;
        out.price = a_t;
        out.method = "futures";
        out.seed = config.seed;
        return out;
    }
    SimRequest req;
    req.measure = Measure::Q1;
    req.t_start = t;
    req.t_end = t_mat;
    req.x_start = a_t;
    req.n_steps = config.n_steps;
    req.n_paths = config.n_paths;
    req.seed = config.seed;
    req.execution = config.execution;
    const PathSet paths = simulate_paths(schedule, req);
    const auto stats = detail::mean_se(paths.terminal);
    PriceResult out;
    out.price = stats.mean;
    out.std_error = stats.std_error;
    out.method = "futures";
    out.n_paths = paths.n_paths;
    out.n_steps = paths.n_steps;
    out.seed = config.seed;
    out.psi_violations = paths.psi_violations;
    return out;
}

Hedge zcb_hedge(const ParamSchedule& schedule, double t, double t_mat, RateModel rates) {
    require(rates == RateModel::Deterministic, ErrorCode::Unsupported,
            "bond hedges under stochastic rates are not constructed");
    return {0.0, zcb_price(schedule, t, t_mat) / riskless_beta(schedule, t)};
}

}  // namespace bbsm
