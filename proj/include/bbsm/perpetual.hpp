#pragma once

#include <functional>
#include <span>

#include "bbsm/model.hpp"

namespace bbsm {

/// Separable candidate f(x, t) = x^gamma h(t) + w(t) with constant coefficients.
struct PerpetualSpec {
    double gamma = 1.0;
    double w0 = 0.0;
    double h0 = 1.0;
    ModelParams params;

    /// PerpetualUnsupported unless v = 0; InvalidArgument unless sigma > 0.
    void validate() const;
};

/// delta = 2 r / sigma^2.
double perpetual_delta(const ModelParams& params);
/// d(t) = delta + 2 rho / (beta_t sigma^2).
double perpetual_d(const ModelParams& params, double t);
/// xi(gamma) = (1 - gamma)(d(t) + gamma).
double perpetual_xi(const ModelParams& params, double gamma, double t);
/// 2 eta / sigma^2 from the h-equation coefficient evaluated at price x.
double perpetual_xi_direct(const ModelParams& params, double gamma, double t, double x);

double perpetual_w(const PerpetualSpec& spec, double t);
double perpetual_h(const PerpetualSpec& spec, double t);
double perpetual_value(const PerpetualSpec& spec, double x, double t);

struct FdSteps {
    double rel_x = 1e-3;  // x step as a fraction of x
    double t = 1e-4;
};

/// max |f_t + psi^2 f_xx / 2 + (chi / beta)(x f_x - f)| over the grid, central
/// differences (one-sided in t near 0).
double pde_residual(const ModelParams& params, const std::function<double(double, double)>& f,
                    std::span<const double> x_grid, std::span<const double> t_grid, FdSteps steps = {});
double pde_residual(const PerpetualSpec& spec, std::span<const double> x_grid, std::span<const double> t_grid,
                    FdSteps steps = {});

}  // namespace bbsm
