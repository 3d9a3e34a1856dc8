#include "bbsm/simulation.hpp"

#include <cmath>

#include "bbsm/error.hpp"
#include "bbsm/rng.hpp"

namespace bbsm {

std::size_t default_steps(double horizon) noexcept {
    const double n = std::ceil(kDefaultStepsPerYear * horizon - 1e-9);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

namespace {

// Per-step coefficients of dA = (c0 + c1 A) dt + max(v + s A, 0) dW.
struct StepPlan {
    std::vector<double> c0, c1, v, s;
    double dt = 0.0;
    double sqrt_dt = 0.0;
};

StepPlan make_plan(const ParamSchedule& schedule, const SimRequest& req, const std::vector<double>& times,
                   bool needs_beta) {
    const std::size_t n = times.size() - 1;
    StepPlan plan;
    plan.c0.resize(n);
    plan.c1.resize(n);
    plan.v.resize(n);
    plan.s.resize(n);
    plan.dt = (req.t_end - req.t_start) / static_cast<double>(n);
    plan.sqrt_dt = std::sqrt(plan.dt);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = times[k];
        const ModelParams& p = schedule.at(t);
        const double rho_over_beta = needs_beta ? p.rho / riskless_beta(schedule, t) : 0.0;
        plan.v[k] = p.v;
        plan.s[k] = p.sigma;
        plan.c0[k] = 0.0;
        switch (req.measure) {
            case Measure::Natural:
                plan.c0[k] = p.a;
                plan.c1[k] = p.mu;
                break;
            case Measure::Q1:
                plan.c1[k] = rho_over_beta + p.r;
                break;
            case Measure::Q2:
                plan.c1[k] = p.r;
                break;
            case Measure::DividendBond:
                plan.c1[k] = p.r - req.dividend_yield + rho_over_beta;
                break;
            case Measure::DividendBank:
                plan.c1[k] = p.r - req.dividend_yield;
                break;
            case Measure::MixedDirect:
                plan.c0[k] = -req.mix_c * p.rho;
                plan.c1[k] = p.r;
                break;
        }
    }
    return plan;
}

// One path; `row` receives every grid value when non-null.
inline double advance_path(const StepPlan& plan, const CounterRng& rng, std::uint64_t path, double x,
                           double* row, std::uint64_t& violations) noexcept {
    const std::size_t n = plan.c1.size();
    if (row) row[0] = x;
    for (std::size_t k = 0; k < n; ++k) {
        double psi = plan.v[k] + plan.s[k] * x;
        if (psi <= 0.0) {
            psi = 0.0;
            ++violations;
        }
        const double z = rng.normal(path, k);
        x += (plan.c0[k] + plan.c1[k] * x) * plan.dt + psi * plan.sqrt_dt * z;
        if (row) row[k + 1] = x;
    }
    return x;
}

}  // namespace

PathSet simulate_paths(const ParamSchedule& schedule, const SimRequest& req) {
    require(req.n_paths >= 1, ErrorCode::InvalidArgument, "n_paths must be >= 1");
    require(req.t_start >= 0.0 && req.t_end > req.t_start, ErrorCode::InvalidArgument,
            "need 0 <= t_start < t_end");
    require(std::isfinite(req.dividend_yield) && std::isfinite(req.mix_c), ErrorCode::InvalidArgument,
            "dividend yield and mixing ratio must be finite");
    const double x0 = req.x_start.value_or(schedule.a0());
    require(std::isfinite(x0), ErrorCode::InvalidArgument, "start value must be finite");

    const bool needs_beta = req.measure != Measure::Natural;
    if (needs_beta) check_maturity(schedule, req.t_end);
    check_no_arbitrage(schedule, req.t_start, x0);

    PathSet out;
    out.n_paths = req.n_paths;
    out.n_steps = req.n_steps == 0 ? default_steps(req.t_end - req.t_start) : req.n_steps;
    const std::size_t n = out.n_steps;
    out.times.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        out.times[k] = req.t_start + (req.t_end - req.t_start) * static_cast<double>(k) / static_cast<double>(n);
    }
    out.times[n] = req.t_end;

    if (riskless_horizon(schedule).time > req.t_end) {
        out.d1.resize(n + 1);
        out.d2.resize(n + 1);
        out.d3.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const auto d = deflators(schedule, out.times[k]);
            out.d1[k] = d.d1;
            out.d2[k] = d.d2;
            out.d3[k] = d.d3;
        }
    }

    const StepPlan plan = make_plan(schedule, req, out.times, needs_beta);
    const CounterRng rng(req.seed);
    out.terminal.resize(req.n_paths);
    if (req.keep_paths) out.paths.resize(req.n_paths * (n + 1));

    const auto n_paths = static_cast<std::int64_t>(req.n_paths);
    std::uint64_t violations = 0;
    double* terminal = out.terminal.data();
    double* rows = req.keep_paths ? out.paths.data() : nullptr;
    if (req.execution == Execution::Serial) {
        for (std::int64_t p = 0; p < n_paths; ++p) {
            double* row = rows ? rows + p * static_cast<std::int64_t>(n + 1) : nullptr;
            terminal[p] = advance_path(plan, rng, static_cast<std::uint64_t>(p), x0, row, violations);
        }
    } else {
#pragma omp parallel for schedule(static) reduction(+ : violations)
        for (std::int64_t p = 0; p < n_paths; ++p) {
            double* row = rows ? rows + p * static_cast<std::int64_t>(n + 1) : nullptr;
            terminal[p] = advance_path(plan, rng, static_cast<std::uint64_t>(p), x0, row, violations);
        }
    }
    out.psi_violations = violations;

    const double budget = kMaxPsiViolationFraction * static_cast<double>(req.n_paths) * static_cast<double>(n);
    if (static_cast<double>(violations) > budget) {
        fail(ErrorCode::ExcessPsiViolations, std::to_string(violations) + " of " +
                                                 std::to_string(req.n_paths * n) +
                                                 " path-steps had psi <= 0");
    }
    return out;
}

}  // namespace bbsm
