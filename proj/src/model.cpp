#include "bbsm/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bbsm/error.hpp"
#include "segments.hpp"

namespace bbsm {

void ModelParams::validate() const {
    for (double x : {a, mu, v, sigma, rho, r, a0}) {
        require(std::isfinite(x), ErrorCode::InvalidArgument, "model coefficients must be finite");
    }
    require(v >= 0.0, ErrorCode::InvalidArgument, "v must be >= 0");
    require(sigma >= 0.0, ErrorCode::InvalidArgument, "sigma must be >= 0");
    require(v + sigma > 0.0, ErrorCode::InvalidArgument, "v + sigma must be > 0");
    require(a0 > 0.0, ErrorCode::InvalidArgument, "a0 must be > 0");
}

ParamSchedule::ParamSchedule(const ModelParams& constant) : breakpoints_{0.0}, params_{constant} {
    constant.validate();
}

ParamSchedule::ParamSchedule(std::vector<double> breakpoints, std::vector<ModelParams> params)
    : breakpoints_(std::move(breakpoints)), params_(std::move(params)) {
    require(!params_.empty(), ErrorCode::InvalidArgument, "schedule needs at least one interval");
    require(breakpoints_.size() == params_.size(), ErrorCode::InvalidArgument,
            "schedule needs one breakpoint per interval");
    require(breakpoints_.front() == 0.0, ErrorCode::InvalidArgument,
            "first schedule interval must start at 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        require(breakpoints_[i] > breakpoints_[i - 1], ErrorCode::InvalidArgument,
                "schedule breakpoints must be strictly increasing");
    }
    for (const auto& p : params_) p.validate();
}

std::size_t ParamSchedule::interval(double t) const noexcept {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

ParamSchedule ParamSchedule::with_scaled_rho(double c) const {
    auto params = params_;
    for (auto& p : params) p.rho *= c;
    return ParamSchedule(breakpoints_, std::move(params));
}

double expm1_ratio(double x) noexcept {
    if (std::abs(x) < 1e-5) return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0));
    return std::expm1(x) / x;
}

namespace detail {

double beta_after(double beta_start, double rho, double r, double tau) noexcept {
    return beta_start * std::exp(r * tau) + rho * tau * expm1_ratio(r * tau);
}

double rho_over_beta_integral(double beta_start, double rho, double r, double tau) noexcept {
    // beta(s + tau) = e^{r tau} (beta_s + rho tau E(-r tau)), so
    // int rho/beta = ln(beta_end / beta_start) - r tau = log1p(rho tau E(-r tau) / beta_s).
    return std::log1p(rho * tau * expm1_ratio(-r * tau) / beta_start);
}

double hit_time(double beta_start, double rho, double r) noexcept {
    constexpr double kNever = std::numeric_limits<double>::infinity();
    if (rho >= 0.0) return kNever;
    const double x = r * beta_start / rho;
    if (x <= -1.0) return kNever;
    const double log_ratio = std::abs(x) < 1e-8 ? 1.0 - 0.5 * x : std::log1p(x) / x;
    return -(beta_start / rho) * log_ratio;
}

}  // namespace detail

double riskless_beta(const ParamSchedule& schedule, double t) {
    require(t >= 0.0, ErrorCode::InvalidArgument, "time must be >= 0");
    double beta = schedule.a0();
    detail::for_each_segment(schedule, 0.0, t, [&](double, double tau, const ModelParams& p) {
        beta = detail::beta_after(beta, p.rho, p.r, tau);
        if (!(beta > 0.0)) {
            fail(ErrorCode::NonPositiveRiskless,
                 "riskless account reaches " + std::to_string(beta) + " by t = " + std::to_string(t));
        }
    });
    return beta;
}

Deflators deflators(const ParamSchedule& schedule, double t) {
    require(t >= 0.0, ErrorCode::InvalidArgument, "time must be >= 0");
    double beta = schedule.a0();
    double log_d2 = 0.0;
    double log_d3 = 0.0;
    detail::for_each_segment(schedule, 0.0, t, [&](double, double tau, const ModelParams& p) {
        const double next = detail::beta_after(beta, p.rho, p.r, tau);
        if (!(next > 0.0)) {
            fail(ErrorCode::NonPositiveRiskless, "riskless account not positive on [0, t]");
        }
        log_d2 -= p.r * tau;
        log_d3 -= detail::rho_over_beta_integral(beta, p.rho, p.r, tau);
        beta = next;
    });
    Deflators d;
    d.d2 = std::exp(log_d2);
    d.d3 = std::exp(log_d3);
    d.d1 = d.d2 * d.d3;
    return d;
}

double market_price_of_risk(const ModelParams& params, double a_t, double beta_t) {
    const double psi = params.psi(a_t);
    if (!(psi > 0.0)) {
        fail(ErrorCode::DegenerateDiffusion, "psi = v + sigma A = " + std::to_string(psi) + " is not positive");
    }
    const double phi = params.phi(a_t);
    const double chi = params.chi(beta_t);
    if (!(phi > chi)) {
        fail(ErrorCode::ArbitrageViolation, "phi = " + std::to_string(phi) + " must exceed chi = " + std::to_string(chi));
    }
    return (phi - chi) / psi;
}

void check_no_arbitrage(const ParamSchedule& schedule, double t, double a_t) {
    market_price_of_risk(schedule.at(t), a_t, riskless_beta(schedule, t));
}

RisklessHorizon riskless_horizon(const ParamSchedule& schedule) {
    const auto bps = schedule.breakpoints();
    const auto params = schedule.params();
    double beta = schedule.a0();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        const double tau_hit = detail::hit_time(beta, p.rho, p.r);
        const bool last = i + 1 == params.size();
        const double length = last ? std::numeric_limits<double>::infinity() : bps[i + 1] - bps[i];
        if (tau_hit < length) {
            return {bps[i] + tau_hit, p.r > 0.0 && p.rho < 0.0};
        }
        if (!last) beta = detail::beta_after(beta, p.rho, p.r, length);
    }
    return {std::numeric_limits<double>::infinity(), false};
}

std::optional<double> maturity_bound(const ModelParams& params) {
    const double r = params.r;
    const double rho = params.rho;
    if (!(r > 0.0 && rho < 0.0)) return std::nullopt;
    const double level = std::abs(rho) / r;
    if (!(params.a0 < level)) return std::nullopt;
    return std::log(level / (level - params.a0)) / r;
}

void check_maturity(const ParamSchedule& schedule, double t_mat) {
    const auto horizon = riskless_horizon(schedule);
    if (horizon.restricted && t_mat > horizon.time) {
        fail(ErrorCode::MaturityRestriction, "maturity " + std::to_string(t_mat) +
                                                 " exceeds the admissible bound " +
                                                 std::to_string(horizon.time));
    }
    if (horizon.time <= t_mat) {
        fail(ErrorCode::NonPositiveRiskless,
             "riskless account reaches 0 at t = " + std::to_string(horizon.time));
    }
}

double bank_accrual(const ParamSchedule& schedule, double t0, double t1) {
    require(0.0 <= t0 && t0 <= t1, ErrorCode::InvalidArgument, "need 0 <= t0 <= t1");
    double log_d2 = 0.0;
    double total = 0.0;
    detail::for_each_segment(schedule, 0.0, t1, [&](double start, double tau, const ModelParams& p) {
        const double end = start + tau;
        if (end > t0) {
            const double lo = std::max(start, t0);
            const double d2_lo = std::exp(log_d2 - p.r * (lo - start));
            const double len = end - lo;
            total += d2_lo * p.rho * len * expm1_ratio(-p.r * len);
        }
        log_d2 -= p.r * tau;
    });
    return total;
}

double parse_double(std::string_view text, std::string_view what) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        fail(ErrorCode::InputError,
             "cannot parse '" + std::string(text) + "' as a number for " + std::string(what));
    }
    return value;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
    KeyValues values;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::InputError, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(ErrorCode::InputError, "config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!values.emplace(std::string(key), std::string(value)).second) {
            fail(ErrorCode::InputError, "config key '" + std::string(key) + "' given twice");
        }
    }
    return values;
}

ModelParams model_from_key_values(KeyValues& values) {
    ModelParams p;
    auto take = [&](const char* key, double& field, bool required) {
        const auto it = values.find(key);
        if (it == values.end()) {
            if (required) fail(ErrorCode::InputError, std::string("missing model key '") + key + "'");
            field = 0.0;
            return;
        }
        field = parse_double(it->second, key);
        values.erase(it);
    };
    take("a", p.a, false);
    take("mu", p.mu, false);
    take("v", p.v, false);
    take("sigma", p.sigma, false);
    take("rho", p.rho, false);
    take("r", p.r, false);
    take("a0", p.a0, true);
    return p;
}

ModelParams parse_model_config(std::string_view text) {
    auto values = parse_key_values(text);
    const auto params = model_from_key_values(values);
    if (!values.empty()) {
        fail(ErrorCode::InputError, "unknown config key '" + values.begin()->first + "'");
    }
    return params;
}

ModelParams load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InputError, "cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_model_config(buffer.str());
}

std::string to_config(const ModelParams& p) {
    std::string out;
    char line[64];
    const std::pair<const char*, double> entries[] = {{"a", p.a},     {"mu", p.mu},   {"v", p.v},
                                                      {"sigma", p.sigma}, {"rho", p.rho}, {"r", p.r},
                                                      {"a0", p.a0}};
    for (const auto& [key, value] : entries) {
        std::snprintf(line, sizeof line, "%s = %.17g\n", key, value);
        out += line;
    }
    return out;
}

}  // namespace bbsm
