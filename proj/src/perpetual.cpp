#include "bbsm/perpetual.hpp"

#include <algorithm>
#include <cmath>

#include "bbsm/error.hpp"

namespace bbsm {

void PerpetualSpec::validate() const {
    params.validate();
    require(params.v == 0.0, ErrorCode::PerpetualUnsupported,
            "separable perpetual solutions need v = 0, got v = " + std::to_string(params.v));
    require(params.sigma > 0.0, ErrorCode::InvalidArgument, "perpetual solutions need sigma > 0");
    require(std::isfinite(gamma) && std::isfinite(w0) && std::isfinite(h0), ErrorCode::InvalidArgument,
            "gamma, w0 and h0 must be finite");
}

double perpetual_delta(const ModelParams& p) {
    require(p.sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be > 0");
    return 2.0 * p.r / (p.sigma * p.sigma);
}

double perpetual_d(const ModelParams& p, double t) {
    const double beta = riskless_beta(ParamSchedule(p), t);
    return perpetual_delta(p) + 2.0 * p.rho / (beta * p.sigma * p.sigma);
}

double perpetual_xi(const ModelParams& p, double gamma, double t) {
    return (1.0 - gamma) * (perpetual_d(p, t) + gamma);
}

double perpetual_xi_direct(const ModelParams& p, double gamma, double t, double x) {
    require(p.sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be > 0");
    const double beta = riskless_beta(ParamSchedule(p), t);
    const double psi = p.psi(x);
    const double eta = (1.0 - gamma) * (p.chi(beta) / beta + 0.5 * psi * psi * gamma / (x * x));
    return 2.0 * eta / (p.sigma * p.sigma);
}

double perpetual_w(const PerpetualSpec& spec, double t) {
    spec.validate();
    return spec.w0 / deflators(ParamSchedule(spec.params), t).d1;
}

double perpetual_h(const PerpetualSpec& spec, double t) {
    spec.validate();
    // int_0^t chi / beta = -ln D1_t = ln(beta_t / beta_0).
    const double log_growth = -std::log(deflators(ParamSchedule(spec.params), t).d1);
    const double g = spec.gamma;
    const double s2 = spec.params.sigma * spec.params.sigma;
    return spec.h0 * std::exp((1.0 - g) * (log_growth + 0.5 * g * s2 * t));
}

double perpetual_value(const PerpetualSpec& spec, double x, double t) {
    require(x > 0.0, ErrorCode::InvalidArgument, "perpetual candidates are defined for x > 0");
    return std::pow(x, spec.gamma) * perpetual_h(spec, t) + perpetual_w(spec, t);
}

double pde_residual(const ModelParams& p, const std::function<double(double, double)>& f,
                    std::span<const double> x_grid, std::span<const double> t_grid, FdSteps steps) {
    require(steps.rel_x > 0.0 && steps.t > 0.0, ErrorCode::InvalidArgument, "finite-difference steps must be > 0");
    const ParamSchedule schedule(p);
    double worst = 0.0;
    for (double t : t_grid) {
        const double beta = riskless_beta(schedule, t);
        const double rate = p.chi(beta) / beta;
        const double ht = steps.t;
        for (double x : x_grid) {
            const double hx = steps.rel_x * std::max(std::abs(x), 1.0);
            const double f0 = f(x, t);
            const double fx = (f(x + hx, t) - f(x - hx, t)) / (2.0 * hx);
            const double fxx = (f(x + hx, t) - 2.0 * f0 + f(x - hx, t)) / (hx * hx);
            const double ft = t >= ht ? (f(x, t + ht) - f(x, t - ht)) / (2.0 * ht)
                                      : (-3.0 * f0 + 4.0 * f(x, t + ht) - f(x, t + 2.0 * ht)) / (2.0 * ht);
            const double psi = p.psi(x);
            const double residual = ft + 0.5 * psi * psi * fxx + rate * (x * fx - f0);
            worst = std::max(worst, std::abs(residual));
        }
    }
    return worst;
}

double pde_residual(const PerpetualSpec& spec, std::span<const double> x_grid, std::span<const double> t_grid,
                    FdSteps steps) {
    spec.validate();
    return pde_residual(
        spec.params, [&](double x, double t) { return perpetual_value(spec, x, t); }, x_grid, t_grid, steps);
}

}  // namespace bbsm
