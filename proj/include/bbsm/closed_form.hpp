#pragma once

#include "bbsm/model.hpp"
#include "bbsm/pricing.hpp"

namespace bbsm {

// Black-Scholes-Merton limit (a = v = rho = 0), continuous dividend yield q.
double bsm_d1(double a0, double k, double r, double sigma, double t_mat, double q = 0.0);
double bsm_call(double a0, double k, double r, double sigma, double t_mat, double q = 0.0);
double bsm_put(double a0, double k, double r, double sigma, double t_mat, double q = 0.0);
double bsm_delta(double a0, double k, double r, double sigma, double t_mat, double q = 0.0);

/// Modernized Bachelier limit (mu = sigma = r = 0) with beta_0 = a0.
struct MbCallInputs {
    double a0 = 100.0;
    double k = 100.0;
    double t_mat = 1.0;
    double v = 10.0;
    double rho = 0.0;
};

/// Terminal standard deviation b and intrinsic term a of the MB call,
/// price = a Phi(a/b) + b phi(a/b).
struct MbTerms {
    double a;
    double b;
};

MbTerms mb_terms(const MbCallInputs& in);
double mb_call(const MbCallInputs& in);
double mb_put(const MbCallInputs& in);
double mb_call_rho0(double a0, double k, double v, double t_mat);

/// beta_0 / beta_T for constant coefficients written the closed way:
/// A0 / ((A0 + rho/r) e^{rT} - rho/r), or A0 / (A0 + rho T) as r -> 0.
double bbsm_prefactor(const ModelParams& params, double t_mat);

enum class QuasiMode {
    DirectSde,       // simulate the bond-unit SDE for A_T
    IntegralForm,    // build A_T from the eta-weighted stochastic integrals
};

/// Prefactor times the Monte Carlo mean of g(A_T) under the bond-unit measure.
PriceResult bbsm_call_quasi(const ModelParams& params, double k, double t_mat, const McConfig& config,
                            QuasiMode mode = QuasiMode::DirectSde);

}  // namespace bbsm
