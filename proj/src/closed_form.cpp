#include "bbsm/closed_form.hpp"

#include <cmath>
#include <vector>

#include "bbsm/error.hpp"
#include "bbsm/normal.hpp"
#include "bbsm/rng.hpp"
#include "bbsm/simulation.hpp"
#include "stats.hpp"

namespace bbsm {

namespace {

void check_bsm(double a0, double k, double sigma, double t_mat) {
    require(a0 > 0.0 && k > 0.0, ErrorCode::InvalidArgument, "BSM needs a0 > 0 and k > 0");
    require(sigma > 0.0, ErrorCode::InvalidArgument, "BSM needs sigma > 0");
    require(t_mat > 0.0, ErrorCode::InvalidArgument, "maturity must be > 0");
}

}  // namespace

double bsm_d1(double a0, double k, double r, double sigma, double t_mat, double q) {
    check_bsm(a0, k, sigma, t_mat);
    return (std::log(a0 / k) + (r - q + 0.5 * sigma * sigma) * t_mat) / (sigma * std::sqrt(t_mat));
}

double bsm_call(double a0, double k, double r, double sigma, double t_mat, double q) {
    const double d1 = bsm_d1(a0, k, r, sigma, t_mat, q);
    const double d2 = d1 - sigma * std::sqrt(t_mat);
    return a0 * std::exp(-q * t_mat) * norm_cdf(d1) - k * std::exp(-r * t_mat) * norm_cdf(d2);
}

double bsm_put(double a0, double k, double r, double sigma, double t_mat, double q) {
    return bsm_call(a0, k, r, sigma, t_mat, q) - a0 * std::exp(-q * t_mat) + k * std::exp(-r * t_mat);
}

double bsm_delta(double a0, double k, double r, double sigma, double t_mat, double q) {
    return std::exp(-q * t_mat) * norm_cdf(bsm_d1(a0, k, r, sigma, t_mat, q));
}

MbTerms mb_terms(const MbCallInputs& in) {
    require(in.a0 > 0.0, ErrorCode::InvalidArgument, "a0 must be > 0");
    require(in.t_mat > 0.0, ErrorCode::InvalidArgument, "maturity must be > 0");
    require(in.v > 0.0, ErrorCode::InvalidArgument, "v must be > 0");
    require(std::isfinite(in.k) && std::isfinite(in.rho), ErrorCode::InvalidArgument, "inputs must be finite");
    const double forward = in.a0 + in.rho * in.t_mat;
    require(forward > 0.0, ErrorCode::NonPositiveForwardDenominator,
            "a0 + rho T = " + std::to_string(forward) + " must be > 0");
    // (1/rho)(1/a0 - 1/(a0 + rho T)) = T / (a0 (a0 + rho T)), no division by rho.
    return {in.a0 - in.a0 * in.k / forward, in.v * std::sqrt(in.t_mat * in.a0 / forward)};
}

double mb_call(const MbCallInputs& in) {
    const auto [a, b] = mb_terms(in);
    if (std::abs(in.rho) <= kRhoEpsilon) return mb_call_rho0(in.a0, in.k, in.v, in.t_mat);
    return a * norm_cdf(a / b) + b * norm_pdf(a / b);
}

double mb_put(const MbCallInputs& in) {
    // C - P = prefactor (Z-forward - K) = a0 - K a0 / (a0 + rho T)
    return mb_call(in) - mb_terms(in).a;
}

double mb_call_rho0(double a0, double k, double v, double t_mat) {
    require(v > 0.0 && t_mat > 0.0, ErrorCode::InvalidArgument, "need v > 0 and maturity > 0");
    const double s = v * std::sqrt(t_mat);
    const double z = (a0 - k) / s;
    return (a0 - k) * norm_cdf(z) + s * norm_pdf(z);
}

double bbsm_prefactor(const ModelParams& p, double t_mat) {
    require(t_mat >= 0.0, ErrorCode::InvalidArgument, "maturity must be >= 0");
    check_maturity(ParamSchedule(p), t_mat);
    // Same value as A0 e^{rT} + rho T (e^{rT} - 1) / (rT); the series side keeps the O(rT) term.
    if (std::abs(p.r) <= kRateEpsilon) return p.a0 / (p.a0 * std::exp(p.r * t_mat) + p.rho * t_mat * expm1_ratio(p.r * t_mat));
    const double level = p.rho / p.r;
    return p.a0 / ((p.a0 + level) * std::exp(p.r * t_mat) - level);
}

namespace {

// A_T = eta_T [A0 - v sigma int eta_s^{-1} ds + v int eta_s^{-1} dB_s] with
// eta_s = (beta_s / beta_0) exp(-sigma^2 s / 2 + sigma B_s), left-point sums.
std::vector<double> integral_form_terminal(const ModelParams& p, double t_mat, const McConfig& cfg,
                                           std::size_t n) {
    const ParamSchedule schedule(p);
    const double dt = t_mat / static_cast<double>(n);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> beta_ratio(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        beta_ratio[k] = riskless_beta(schedule, t_mat * static_cast<double>(k) / static_cast<double>(n)) / p.a0;
    }
    const CounterRng rng(cfg.seed);
    std::vector<double> terminal(cfg.n_paths);
    const auto n_paths = static_cast<std::int64_t>(cfg.n_paths);
    auto one_path = [&](std::int64_t path) {
        double b = 0.0;
        double drift_sum = 0.0;
        double noise_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double s = dt * static_cast<double>(k);
            const double inv_eta = std::exp(0.5 * p.sigma * p.sigma * s - p.sigma * b) / beta_ratio[k];
            const double db = sqrt_dt * rng.normal(static_cast<std::uint64_t>(path), k);
            drift_sum += inv_eta * dt;
            noise_sum += inv_eta * db;
            b += db;
        }
        const double eta_t = beta_ratio[n] * std::exp(-0.5 * p.sigma * p.sigma * t_mat + p.sigma * b);
        terminal[static_cast<std::size_t>(path)] = eta_t * (p.a0 - p.v * p.sigma * drift_sum + p.v * noise_sum);
    };
    if (cfg.execution == Execution::Serial) {
        for (std::int64_t path = 0; path < n_paths; ++path) one_path(path);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t path = 0; path < n_paths; ++path) one_path(path);
    }
    return terminal;
}

}  // namespace

PriceResult bbsm_call_quasi(const ModelParams& p, double k, double t_mat, const McConfig& cfg, QuasiMode mode) {
    p.validate();
    require(t_mat > 0.0, ErrorCode::InvalidArgument, "maturity must be > 0");
    require(std::isfinite(k), ErrorCode::InvalidArgument, "strike must be finite");
    const double prefactor = bbsm_prefactor(p, t_mat);

    PriceResult out;
    out.n_paths = cfg.n_paths;
    out.seed = cfg.seed;
    std::vector<double> terminal;
    if (mode == QuasiMode::DirectSde) {
        SimRequest req;
        req.measure = Measure::Q1;
        req.t_end = t_mat;
        req.n_steps = cfg.n_steps;
        req.n_paths = cfg.n_paths;
        req.seed = cfg.seed;
        req.execution = cfg.execution;
        auto paths = simulate_paths(ParamSchedule(p), req);
        terminal = std::move(paths.terminal);
        out.n_steps = paths.n_steps;
        out.psi_violations = paths.psi_violations;
        out.method = "quasi-bbsm";
    } else {
        require(cfg.n_paths >= 1, ErrorCode::InvalidArgument, "n_paths must be >= 1");
        check_no_arbitrage(ParamSchedule(p), 0.0, p.a0);
        out.n_steps = cfg.n_steps == 0 ? default_steps(t_mat) : cfg.n_steps;
        terminal = integral_form_terminal(p, t_mat, cfg, out.n_steps);
        out.method = "quasi-bbsm-integral";
    }
    for (double& x : terminal) x = std::max(x - k, 0.0);
    const auto stats = detail::mean_se(terminal);
    out.price = prefactor * stats.mean;
    out.std_error = prefactor * stats.std_error;
    return out;
}

}  // namespace bbsm
