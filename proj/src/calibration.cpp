#include "bbsm/calibration.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>

#include "bbsm/error.hpp"
#include "bbsm/robust_regression.hpp"

namespace bbsm {

void PriceSeries::validate() const {
    require(times.size() == prices.size(), ErrorCode::InvalidArgument, "times and prices must have equal length");
    require(prices.size() >= 2, ErrorCode::InsufficientData, "price series needs at least 2 observations");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        require(std::isfinite(prices[i]) && std::isfinite(times[i]), ErrorCode::InvalidArgument,
                "price series must be finite");
        if (i > 0) {
            require(times[i] > times[i - 1], ErrorCode::InvalidArgument, "observation times must increase");
        }
    }
}

PriceSeries PriceSeries::daily(std::vector<double> prices) {
    PriceSeries s;
    s.times.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) s.times[i] = static_cast<double>(i);
    s.prices = std::move(prices);
    return s;
}

double CalibResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    fail(ErrorCode::InvalidArgument, "no fitted parameter named " + name);
}

namespace {

struct WindowStats {
    std::vector<double> start_price;
    std::vector<double> mean_rate;  // mean change per year
    std::vector<double> sd_rate;    // sd of changes per sqrt(year)
};

WindowStats window_stats(const PriceSeries& series, std::size_t window) {
    series.validate();
    require(window >= 2, ErrorCode::InvalidArgument, "window must be >= 2");
    const std::size_t n = series.prices.size();
    require(n >= window + 2, ErrorCode::InsufficientData,
            "series of " + std::to_string(n) + " points is too short for window " + std::to_string(window));
    WindowStats out;
    const std::size_t n_windows = n - window;
    out.start_price.reserve(n_windows);
    out.mean_rate.reserve(n_windows);
    out.sd_rate.reserve(n_windows);
    std::vector<double> scaled(window);
    for (std::size_t s = 0; s < n_windows; ++s) {
        // Changes are normalised to a unit step: c / dt for the mean,
        // c / sqrt(dt) for the spread.
        double span = 0.0;
        double mean = 0.0;
        for (std::size_t j = 0; j < window; ++j) {
            const double dt = (series.times[s + j + 1] - series.times[s + j]) / kTradingDaysPerYear;
            const double change = series.prices[s + j + 1] - series.prices[s + j];
            span += dt;
            scaled[j] = change / std::sqrt(dt);
            mean += scaled[j];
        }
        mean /= static_cast<double>(window);
        double ss = 0.0;
        for (double c : scaled) ss += (c - mean) * (c - mean);
        out.start_price.push_back(series.prices[s]);
        out.mean_rate.push_back((series.prices[s + window] - series.prices[s]) / span);
        out.sd_rate.push_back(std::sqrt(ss / static_cast<double>(window - 1)));
    }
    return out;
}

}  // namespace

CalibResult calibrate_drift(const PriceSeries& series, std::size_t window) {
    const auto stats = window_stats(series, window);
    const auto fit = huber_line(stats.start_price, stats.mean_rate);
    return {{"a", "mu"}, {fit.intercept, fit.slope}, fit.objective, fit.iterations, false};
}

CalibResult calibrate_vol(const PriceSeries& series, std::size_t window) {
    const auto stats = window_stats(series, window);
    const auto fit = huber_line_nonnegative(stats.start_price, stats.sd_rate);
    return {{"v", "sigma"}, {fit.intercept, fit.slope}, fit.objective, fit.iterations, fit.constrained};
}

double estimate_pn(const PriceSeries& series) {
    series.validate();
    const std::size_t m = series.prices.size() - 1;
    require(m >= 2, ErrorCode::InsufficientData, "estimating p_n needs at least 2 price changes");
    double ups = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double change = series.prices[i + 1] - series.prices[i];
        if (change > 0.0) {
            ups += 1.0;
        } else if (change == 0.0) {
            ups += 0.5;
        }
    }
    const double lo = 1.0 / static_cast<double>(m);
    return std::clamp(ups / static_cast<double>(m), lo, 1.0 - lo);
}

namespace {

constexpr double kFailedObjective = 1e10;

double penalty_term(const FixedCoefficients& fixed, double a0, double rho, double r, double weight) {
    const double excess = rho + r * a0 - (fixed.a + fixed.mu * a0);
    return excess > 0.0 ? weight * excess * excess : 0.0;
}

// Sum of squared relative pricing errors; kFailedObjective when the tree
// cannot be built at (rho, r).
double pricing_error(const QuoteSheet& sheet, const FixedCoefficients& fixed, const RisklessOptions& options,
                     double rho, double r) {
    ModelParams p{fixed.a, fixed.mu, fixed.v, fixed.sigma, rho, r, sheet.a0};
    const auto n_quotes = static_cast<std::int64_t>(sheet.quotes.size());
    std::vector<double> err(sheet.quotes.size(), 0.0);
    int failed = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failed)
    for (std::int64_t i = 0; i < n_quotes; ++i) {
        const Quote& quote = sheet.quotes[static_cast<std::size_t>(i)];
        try {
            TreeSpec spec{ParamSchedule(p)};
            spec.n = options.tree_n;
            spec.t_mat = quote.maturity;
            spec.p_n = fixed.p_n;
            spec.mode = options.mode;
            spec.bucket_points = options.bucket_points;
            spec.check_root_arbitrage = false;
            const auto option = quote.kind == OptionKind::Put ? OptionSpec::put(quote.strike, quote.maturity)
                                                              : OptionSpec::call(quote.strike, quote.maturity);
            const double model = tree_price(spec, option);
            const double rel = (model - quote.price) / quote.price;
            err[static_cast<std::size_t>(i)] = rel * rel;
        } catch (const Error&) {
            failed += 1;
        }
    }
    if (failed > 0) return kFailedObjective;
    double total = 0.0;
    for (double e : err) total += e;
    return total;
}

struct Context {
    const QuoteSheet* sheet;
    const FixedCoefficients* fixed;
    const RisklessOptions* options;
};

// Search variables: (rho / a0, r).
double gsl_objective(const gsl_vector* x, void* raw) {
    const auto* ctx = static_cast<const Context*>(raw);
    const double rho = gsl_vector_get(x, 0) * ctx->sheet->a0;
    const double r = gsl_vector_get(x, 1);
    if (!std::isfinite(rho) || !std::isfinite(r)) return kFailedObjective;
    return pricing_error(*ctx->sheet, *ctx->fixed, *ctx->options, rho, r) +
           penalty_term(*ctx->fixed, ctx->sheet->a0, rho, r, ctx->options->penalty);
}

struct Run {
    double x0 = 0.0;
    double x1 = 0.0;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

Run simplex(Context& ctx, double x0, double x1, double step, std::size_t max_iterations) {
    gsl_multimin_function fn{&gsl_objective, 2, &ctx};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(2), gsl_vector_free);
    gsl_vector_set(x.get(), 0, x0);
    gsl_vector_set(x.get(), 1, x1);
    gsl_vector_set_all(ss.get(), step);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

    Run run;
    for (run.iterations = 1; run.iterations <= max_iterations; ++run.iterations) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (s->fval < 1e-26 || gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), 1e-11) == GSL_SUCCESS) {
            run.converged = true;
            break;
        }
    }
    run.iterations = std::min(run.iterations, max_iterations);
    run.x0 = gsl_vector_get(s->x, 0);
    run.x1 = gsl_vector_get(s->x, 1);
    run.f = s->fval;
    return run;
}

}  // namespace

double riskless_objective(const QuoteSheet& sheet, const FixedCoefficients& fixed, const RisklessOptions& options,
                          double rho, double r) {
    return pricing_error(sheet, fixed, options, rho, r) + penalty_term(fixed, sheet.a0, rho, r, options.penalty);
}

CalibResult calibrate_riskless(const QuoteSheet& sheet, const FixedCoefficients& fixed,
                               const RisklessOptions& options) {
    require(sheet.quotes.size() >= 2, ErrorCode::InsufficientData, "a two-parameter fit needs at least 2 quotes");
    require(sheet.a0 > 0.0, ErrorCode::InvalidArgument, "spot must be > 0");
    require(sheet.t == 0.0, ErrorCode::Unsupported, "quotes must be valued at t = 0");
    for (const auto& q : sheet.quotes) {
        require(q.price > 0.0 && q.maturity > 0.0 && q.strike > 0.0, ErrorCode::InvalidArgument,
                "quotes need positive price, maturity and strike");
    }
    require(fixed.p_n > 0.0 && fixed.p_n < 1.0, ErrorCode::InvalidArgument, "p_n must lie in (0, 1)");
    ModelParams{fixed.a, fixed.mu, fixed.v, fixed.sigma, 0.0, 0.0, sheet.a0}.validate();

    gsl_set_error_handler_off();
    Context ctx{&sheet, &fixed, &options};
    const double phi0 = fixed.a + fixed.mu * sheet.a0;

    struct Start {
        double x0, x1, f;
    };
    std::vector<Start> starts;
    for (double r : {0.0, 0.02, 0.05}) {
        for (double rho_rel : {0.0, 0.01, -0.01}) {
            const double rho = rho_rel * sheet.a0;
            if (!(rho + r * sheet.a0 < phi0)) continue;
            const double f = riskless_objective(sheet, fixed, options, rho, r);
            if (f < kFailedObjective) starts.push_back({rho_rel, r, f});
        }
    }
    require(!starts.empty(), ErrorCode::InfeasibleConstraint,
            "no start point satisfies rho + r a0 < a + mu a0 with a valid tree");
    std::sort(starts.begin(), starts.end(), [](const Start& x, const Start& y) { return x.f < y.f; });
    starts.resize(std::min<std::size_t>(starts.size(), 3));

    Run best;
    bool have = false;
    std::size_t iterations = 0;
    for (const auto& st : starts) {
        Run run = simplex(ctx, st.x0, st.x1, 0.005, options.max_iterations);
        iterations += run.iterations;
        if (!have || run.f < best.f) {
            best = run;
            have = true;
        }
    }
    // Restart from the incumbent with a fresh, smaller simplex until it stops improving.
    for (int restart = 0; restart < 4; ++restart) {
        Run run = simplex(ctx, best.x0, best.x1, 1e-3, options.max_iterations);
        iterations += run.iterations;
        const bool improved = run.f < best.f * (1.0 - 1e-6);
        if (run.f <= best.f) best = run;
        if (!improved) break;
    }
    if (!best.converged && best.f > 1e-20) {
        fail(ErrorCode::NonConvergence, "simplex search did not converge in " + std::to_string(iterations) +
                                            " iterations");
    }

    double rho = best.x0 * sheet.a0;
    double r = best.x1;
    bool active = false;
    const double margin = 1e-9 * std::max(1.0, std::abs(phi0));
    if (rho + r * sheet.a0 >= phi0 - margin) {
        rho = phi0 - margin - r * sheet.a0;
        active = true;
    }
    const double objective = pricing_error(sheet, fixed, options, rho, r);
    require(objective < kFailedObjective, ErrorCode::NonConvergence, "fitted point does not admit a valid tree");
    return {{"rho", "r"}, {rho, r}, objective, iterations, active};
}

double esg_adjust(const EsgInput& in) {
    require(in.s > 0.0 && std::isfinite(in.s), ErrorCode::InvalidArgument, "financial price must be > 0");
    require(in.z_company >= 0.0 && in.z_company <= 100.0, ErrorCode::InvalidArgument,
            "company score must lie in [0, 100]");
    require(in.z_index >= 0.0 && in.z_index <= 100.0, ErrorCode::InvalidArgument, "index score must lie in [0, 100]");
    require(in.z_index != 0.0, ErrorCode::ZeroIndexScore, "index score must be > 0");
    require(std::isfinite(in.gamma_esg), ErrorCode::InvalidArgument, "ESG affinity must be finite");
    return in.s * (1.0 + in.gamma_esg * (in.z_company - in.z_index) / in.z_index);
}

}  // namespace bbsm
