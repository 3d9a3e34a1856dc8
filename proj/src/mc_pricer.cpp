#include "bbsm/mc_pricer.hpp"

#include <algorithm>
#include <cmath>

#include "bbsm/error.hpp"
#include "stats.hpp"

namespace bbsm {

OptionSpec OptionSpec::call(double strike, double maturity) {
    OptionSpec s;
    s.kind = OptionKind::Call;
    s.strike = strike;
    s.maturity = maturity;
    return s;
}

OptionSpec OptionSpec::put(double strike, double maturity) {
    OptionSpec s = call(strike, maturity);
    s.kind = OptionKind::Put;
    return s;
}

OptionSpec OptionSpec::custom(std::function<double(double)> payoff, double maturity) {
    OptionSpec s;
    s.kind = OptionKind::Custom;
    s.strike = 0.0;
    s.maturity = maturity;
    s.payoff = std::move(payoff);
    return s;
}

double OptionSpec::value(double a_T) const {
    switch (kind) {
        case OptionKind::Call: return std::max(a_T - strike, 0.0);
        case OptionKind::Put: return std::max(strike - a_T, 0.0);
        case OptionKind::Custom: return payoff(a_T);
    }
    return 0.0;
}

void OptionSpec::validate() const {
    require(maturity > 0.0 && std::isfinite(maturity), ErrorCode::InvalidArgument, "maturity must be > 0");
    require(std::isfinite(dividend_yield), ErrorCode::InvalidArgument, "dividend yield must be finite");
    if (kind == OptionKind::Custom) {
        require(static_cast<bool>(payoff), ErrorCode::InvalidArgument, "custom option needs a payoff");
    } else {
        require(strike > 0.0 && std::isfinite(strike), ErrorCode::InvalidArgument, "strike must be > 0");
    }
}

PriceResult summarize(const McSample& sample) {
    PriceResult out = sample.meta;
    const auto stats = detail::mean_se(sample.values);
    out.price = stats.mean + sample.offset;
    out.std_error = stats.std_error;
    out.negative_price = out.price < 0.0;
    return out;
}

PairedDifference paired_difference(const McSample& a, const McSample& b) {
    require(a.values.size() == b.values.size(), ErrorCode::InvalidArgument,
            "paired samples need the same number of paths");
    std::vector<double> diff(a.values.size());
    PairedDifference out;
    const double offset = a.offset - b.offset;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = a.values[i] - b.values[i];
        out.max_abs = std::max(out.max_abs, std::abs(diff[i] + offset));
    }
    const auto stats = detail::mean_se(diff);
    out.mean = stats.mean + offset;
    out.std_error = stats.std_error;
    return out;
}

namespace {

enum class Discount { D1, D2 };

McSample run(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& cfg, Measure measure,
             Discount discount, double accrual_sign, const StartState& start, double mix_c,
             const char* method) {
    option.validate();
    require(start.t >= 0.0 && start.t < option.maturity, ErrorCode::InvalidArgument,
            "start time must lie in [0, maturity)");

    SimRequest req;
    req.measure = measure;
    req.t_start = start.t;
    req.t_end = option.maturity;
    req.x_start = start.x;
    req.n_steps = cfg.n_steps;
    req.n_paths = cfg.n_paths;
    req.seed = cfg.seed;
    req.dividend_yield = option.dividend_yield;
    req.mix_c = mix_c;
    req.execution = cfg.execution;
    const PathSet paths = simulate_paths(schedule, req);

    McSample sample;
    const auto& d = discount == Discount::D1 ? paths.d1 : paths.d2;
    const double factor = d.back() / d.front();
    sample.values.resize(paths.n_paths);
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        sample.values[i] = factor * option.value(paths.terminal[i]);
    }
    if (accrual_sign != 0.0) {
        sample.offset = accrual_sign * bank_accrual(schedule, start.t, option.maturity) / d.front();
    }
    sample.meta.method = method;
    sample.meta.n_paths = paths.n_paths;
    sample.meta.n_steps = paths.n_steps;
    sample.meta.seed = cfg.seed;
    sample.meta.psi_violations = paths.psi_violations;
    return sample;
}

}  // namespace

McSample sample_q1(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& cfg,
                   const StartState& start) {
    return run(schedule, option, cfg, Measure::Q1, Discount::D1, 0.0, start, 1.0, "mc-q1");
}

McSample sample_q2_bank(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& cfg,
                        const StartState& start) {
    return run(schedule, option, cfg, Measure::Q2, Discount::D2, -1.0, start, 1.0, "mc-q2");
}

McSample sample_dividend(const ParamSchedule& schedule, const OptionSpec& option, Convention convention,
                         const McConfig& cfg, const StartState& start) {
    if (convention == Convention::Bond) {
        return run(schedule, option, cfg, Measure::DividendBond, Discount::D1, 0.0, start, 1.0,
                   "mc-dividend-bond");
    }
    return run(schedule, option, cfg, Measure::DividendBank, Discount::D2, -1.0, start, 1.0, "mc-dividend-bank");
}

McSample sample_mixed_deflator(const ParamSchedule& schedule, const OptionSpec& option,
                               const MixedDeflatorSpec& mix, const McConfig& cfg) {
    require(std::isfinite(mix.c), ErrorCode::InvalidArgument, "mixing ratio must be finite");
    auto sample = sample_q2_bank(schedule.with_scaled_rho(mix.c), option, cfg);
    sample.meta.method = "mc-mixed";
    return sample;
}

McSample sample_mixed_deflator_direct(const ParamSchedule& schedule, const OptionSpec& option,
                                      const MixedDeflatorSpec& mix, const McConfig& cfg) {
    require(std::isfinite(mix.c), ErrorCode::InvalidArgument, "mixing ratio must be finite");
    return run(schedule, option, cfg, Measure::MixedDirect, Discount::D2, mix.c, {}, mix.c, "mc-mixed-direct");
}

PriceResult price_q1(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& cfg) {
    return summarize(sample_q1(schedule, option, cfg));
}

PriceResult price_q2_bank(const ParamSchedule& schedule, const OptionSpec& option, const McConfig& cfg) {
    return summarize(sample_q2_bank(schedule, option, cfg));
}

PriceResult price_dividend(const ParamSchedule& schedule, const OptionSpec& option, Convention convention,
                           const McConfig& cfg) {
    return summarize(sample_dividend(schedule, option, convention, cfg));
}

PriceResult price_mixed_deflator(const ParamSchedule& schedule, const OptionSpec& option,
                                 const MixedDeflatorSpec& mix, const McConfig& cfg) {
    return summarize(sample_mixed_deflator(schedule, option, mix, cfg));
}

PriceResult price_mixed_deflator_direct(const ParamSchedule& schedule, const OptionSpec& option,
                                        const MixedDeflatorSpec& mix, const McConfig& cfg) {
    return summarize(sample_mixed_deflator_direct(schedule, option, mix, cfg));
}

DeltaResult delta_fd(const ParamSchedule& schedule, const OptionSpec& option, Convention convention, double bump,
                     const McConfig& cfg) {
    require(bump > 0.0 && bump < 1.0, ErrorCode::InvalidArgument, "bump must be in (0, 1)");
    const double x0 = schedule.a0();
    const double h = bump * x0;
    auto sample_at = [&](double x) {
        const StartState start{0.0, x};
        return convention == Convention::Bond ? sample_dividend(schedule, option, Convention::Bond, cfg, start)
                                              : sample_dividend(schedule, option, Convention::Bank, cfg, start);
    };
    const auto up = sample_at(x0 + h);
    const auto down = sample_at(x0 - h);
    const auto diff = paired_difference(up, down);
    return {diff.mean / (2.0 * h), diff.std_error / (2.0 * h)};
}

}  // namespace bbsm
