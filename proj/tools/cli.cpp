#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bbsm/binomial.hpp"
#include "bbsm/calibration.hpp"
#include "bbsm/closed_form.hpp"
#include "bbsm/csv.hpp"
#include "bbsm/error.hpp"
#include "bbsm/mc_pricer.hpp"
#include "bbsm/model.hpp"
#include "bbsm/perpetual.hpp"
#include "bbsm/simulation.hpp"
#include "bbsm/term_structure.hpp"

namespace bbsm::cli {

namespace {

using Json = nlohmann::ordered_json;

enum class Format { Json, Csv, Text };

constexpr const char* kModelKeys[] = {"a", "mu", "v", "sigma", "rho", "r", "a0"};

std::string dashed(std::string key) {
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    return key;
}

std::string format_number(double x, bool full) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.10g", x);
    return buf;
}

// A subcommand whose options can also be given as config-file keys. Flags win
// over the config file.
class Command {
public:
    Command(CLI::App& parent, const std::string& name, const std::string& description)
        : app_(parent.add_subcommand(name, description)), name_(name) {
        app_->add_option("--config", config_path_, "flat key = value file (model keys and command options)");
        app_->add_option("--seed", seed_, "random seed")->default_val(0);
        app_->add_option("--format", format_, "output format")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        app_->add_option("--out", out_path_, "write the primary output to this file");
        app_->add_option("--set", overrides_, "extra key=value setting, repeatable");
    }

    Command& option(const std::string& key, const std::string& help, std::string fallback = {}) {
        values_[key] = std::move(fallback);
        app_->add_option("--" + dashed(key), values_[key], help);
        return *this;
    }

    Command& choice(const std::string& key, const std::string& help, std::vector<std::string> allowed,
                    std::string fallback) {
        values_[key] = std::move(fallback);
        app_->add_option("--" + dashed(key), values_[key], help)->check(CLI::IsMember(allowed));
        allowed_[key] = std::move(allowed);
        return *this;
    }

    CLI::App* app() const { return app_; }
    const std::string& name() const { return name_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& out_path() const { return out_path_; }

    Format format(Format fallback) const {
        if (format_.empty()) return fallback;
        if (format_ == "csv") return Format::Csv;
        if (format_ == "text") return Format::Text;
        return Format::Json;
    }

    /// Config file plus --set overrides, before the model keys are taken out.
    KeyValues settings() const {
        KeyValues kv;
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in) fail(ErrorCode::InputError, "cannot open config file " + config_path_);
            std::stringstream buffer;
            buffer << in.rdbuf();
            kv = parse_key_values(buffer.str());
        }
        for (const auto& item : overrides_) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
                fail(ErrorCode::InputError, "--set expects key=value, got '" + item + "'");
            }
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
        return kv;
    }

    /// Moves command options out of `kv`; anything left over is rejected.
    void absorb(KeyValues& kv) {
        for (auto it = kv.begin(); it != kv.end();) {
            const auto known = values_.find(it->first);
            if (known == values_.end()) {
                fail(ErrorCode::InputError, "unknown config key '" + it->first + "' for " + name_);
            }
            if (app_->count("--" + dashed(it->first)) == 0) {
                if (const auto allowed = allowed_.find(it->first); allowed != allowed_.end()) {
                    const auto& list = allowed->second;
                    if (std::find(list.begin(), list.end(), it->second) == list.end()) {
                        fail(ErrorCode::InputError, "config key '" + it->first + "' has invalid value '" +
                                                        it->second + "'");
                    }
                }
                known->second = it->second;
            }
            it = kv.erase(it);
        }
    }

    bool has(const std::string& key) const { return !values_.at(key).empty(); }
    const std::string& str(const std::string& key) const { return values_.at(key); }

    double num(const std::string& key) const {
        if (!has(key)) fail(ErrorCode::InputError, "missing value for " + key);
        return parse_double(values_.at(key), key);
    }

    std::size_t count(const std::string& key) const {
        const double x = num(key);
        if (!(x >= 0.0 && x == std::floor(x) && x < 1e15)) {
            fail(ErrorCode::InputError, key + " must be a nonnegative integer");
        }
        return static_cast<std::size_t>(x);
    }

private:
    CLI::App* app_;
    std::string name_;
    std::string config_path_;
    std::uint64_t seed_ = 0;
    std::string format_;
    std::string out_path_;
    std::vector<std::string> overrides_;
    std::map<std::string, std::string> values_;
    std::map<std::string, std::vector<std::string>> allowed_;
};

// Key/value report rendered in any of the three formats.
struct Report {
    Json fields = Json::object();

    void render(std::ostream& out, Format format) const {
        if (format == Format::Json) {
            out << fields.dump(2) << '\n';
            return;
        }
        if (format == Format::Text) {
            for (const auto& [key, value] : fields.items()) out << key << ": " << scalar(value, false) << '\n';
            return;
        }
        std::string header, row;
        bool first = true;
        for (const auto& [key, value] : fields.items()) {
            header += (first ? "" : ",") + key;
            row += (first ? "" : ",") + scalar(value, true);
            first = false;
        }
        out << header << '\n' << row << '\n';
    }

    static std::string scalar(const Json& v, bool full) {
        if (v.is_number_float()) return format_number(v.get<double>(), full);
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }
};

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void render(std::ostream& out, Format format) const {
        if (format == Format::Json) {
            Json doc = Json::object();
            doc["command"] = command;
            Json list = Json::array();
            for (const auto& row : rows) {
                Json item = Json::object();
                for (std::size_t c = 0; c < columns.size(); ++c) {
                    if (std::isnan(row[c])) {
                        item[columns[c]] = nullptr;
                    } else {
                        item[columns[c]] = row[c];
                    }
                }
                list.push_back(std::move(item));
            }
            doc["rows"] = std::move(list);
            out << doc.dump(2) << '\n';
            return;
        }
        const bool csv = format == Format::Csv;
        const char* sep = csv ? "," : " ";
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? sep : "") << columns[c];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? sep : "") << format_number(row[c], csv);
            out << '\n';
        }
    }
};

ParamSchedule model_schedule(KeyValues& kv) {
    const ModelParams p = model_from_key_values(kv);
    p.validate();
    return ParamSchedule(p);
}

McConfig mc_config(const Command& cmd) {
    McConfig cfg;
    cfg.n_paths = cmd.count("paths");
    cfg.n_steps = cmd.count("steps");
    cfg.seed = cmd.seed();
    return cfg;
}

TreeMode tree_mode(const std::string& name) {
    if (name == "recombining") return TreeMode::Recombining;
    if (name == "exact") return TreeMode::Exact;
    if (name == "bucketed") return TreeMode::Bucketed;
    return TreeMode::Auto;
}

std::vector<double> number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(item, what));
    if (out.empty()) fail(ErrorCode::InputError, what + " needs at least one value");
    return out;
}

void add_result(Report& report, const PriceResult& r) {
    report.fields["price"] = r.price;
    report.fields["std_error"] = r.std_error;
    report.fields["n_paths"] = r.n_paths;
    report.fields["n_steps"] = r.n_steps;
    report.fields["seed"] = r.seed;
    report.fields["psi_violations"] = r.psi_violations;
    report.fields["negative_price"] = r.negative_price;
}

OptionSpec option_from(const Command& cmd) {
    const double t_mat = cmd.num("maturity");
    const std::string& kind = cmd.str("kind");
    OptionSpec spec = kind == "put"    ? OptionSpec::put(cmd.num("strike"), t_mat)
                      : kind == "unit" ? OptionSpec::custom([](double) { return 1.0; }, t_mat)
                                       : OptionSpec::call(cmd.num("strike"), t_mat);
    spec.dividend_yield = cmd.num("dividend");
    return spec;
}

Report cmd_price(const Command& cmd, const ParamSchedule& schedule) {
    const ModelParams& p = schedule.at(0.0);
    const std::string& method = cmd.str("method");
    const OptionSpec option = option_from(cmd);
    option.validate();
    const bool is_put = option.kind == OptionKind::Put;
    const bool unit = option.kind == OptionKind::Custom;

    Report report;
    report.fields["command"] = "price";
    report.fields["method"] = method;
    report.fields["kind"] = cmd.str("kind");
    report.fields["strike"] = unit ? 0.0 : option.strike;
    report.fields["maturity"] = option.maturity;

    PriceResult result;
    result.method = method;
    result.seed = cmd.seed();
    if (method == "closed-bsm" || method == "closed-mb" || method == "quasi-bbsm") {
        require(!unit, ErrorCode::InvalidArgument, method + " prices calls and puts only");
    }
    if (method == "closed-bsm") {
        require(p.a == 0.0 && p.v == 0.0 && p.rho == 0.0, ErrorCode::InvalidArgument,
                "closed-bsm needs a = v = rho = 0");
        const double q = option.dividend_yield;
        result.price = is_put ? bsm_put(p.a0, option.strike, p.r, p.sigma, option.maturity, q)
                              : bsm_call(p.a0, option.strike, p.r, p.sigma, option.maturity, q);
    } else if (method == "closed-mb") {
        require(p.mu == 0.0 && p.sigma == 0.0 && p.r == 0.0, ErrorCode::InvalidArgument,
                "closed-mb needs mu = sigma = r = 0");
        require(option.dividend_yield == 0.0, ErrorCode::InvalidArgument, "closed-mb has no dividend yield");
        const MbCallInputs in{p.a0, option.strike, option.maturity, p.v, p.rho};
        result.price = is_put ? mb_put(in) : mb_call(in);
    } else if (method == "quasi-bbsm") {
        require(option.dividend_yield == 0.0, ErrorCode::InvalidArgument, "quasi-bbsm has no dividend yield");
        require(schedule.is_constant(), ErrorCode::InvalidArgument, "quasi-bbsm needs constant coefficients");
        result = bbsm_call_quasi(p, option.strike, option.maturity, mc_config(cmd));
        if (is_put) result.price += option.strike * bbsm_prefactor(p, option.maturity) - p.a0;
    } else if (method == "mc-q1" || method == "mc-q2") {
        const Convention convention = method == "mc-q1" ? Convention::Bond : Convention::Bank;
        if (option.dividend_yield != 0.0) {
            result = price_dividend(schedule, option, convention, mc_config(cmd));
        } else if (convention == Convention::Bond) {
            result = price_q1(schedule, option, mc_config(cmd));
        } else {
            result = price_q2_bank(schedule, option, mc_config(cmd));
        }
    } else {
        TreeSpec spec{schedule};
        spec.n = cmd.count("tree_n");
        spec.t_mat = option.maturity;
        spec.p_n = cmd.num("p_n");
        spec.mode = tree_mode(cmd.str("tree_mode"));
        spec.bucket_points = cmd.count("bucket_points");
        const TreeResult tree = tree_price_detailed(spec, option);
        result.price = tree.price;
        result.n_steps = spec.n;
        report.fields["tree_mode"] = tree.mode == TreeMode::Recombining ? "recombining"
                                     : tree.mode == TreeMode::Exact     ? "exact"
                                                                        : "bucketed";
    }
    result.negative_price = result.price < 0.0;
    add_result(report, result);
    return report;
}

Table cmd_simulate(const Command& cmd, const ParamSchedule& schedule) {
    SimRequest req;
    const std::string& m = cmd.str("measure");
    req.measure = m == "natural"         ? Measure::Natural
                  : m == "q2"            ? Measure::Q2
                  : m == "dividend-bond" ? Measure::DividendBond
                  : m == "dividend-bank" ? Measure::DividendBank
                                         : Measure::Q1;
    req.t_end = cmd.num("maturity");
    req.n_paths = cmd.count("paths");
    req.n_steps = cmd.count("steps");
    req.seed = cmd.seed();
    req.dividend_yield = cmd.num("dividend");
    req.keep_paths = true;
    const PathSet paths = simulate_paths(schedule, req);

    Table table;
    table.command = "simulate";
    table.columns = {"t", "mean", "sd", "d1", "d2", "d3"};
    const bool have_deflators = !paths.d1.empty();
    for (std::size_t k = 0; k <= paths.n_steps; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < paths.n_paths; ++i) sum += paths.at(i, k);
        const double mean = sum / static_cast<double>(paths.n_paths);
        double ss = 0.0;
        for (std::size_t i = 0; i < paths.n_paths; ++i) ss += (paths.at(i, k) - mean) * (paths.at(i, k) - mean);
        const double sd = paths.n_paths > 1 ? std::sqrt(ss / static_cast<double>(paths.n_paths - 1)) : 0.0;
        const double nan = std::nan("");
        table.rows.push_back({paths.times[k], mean, sd, have_deflators ? paths.d1[k] : nan,
                              have_deflators ? paths.d2[k] : nan, have_deflators ? paths.d3[k] : nan});
    }
    return table;
}

Table cmd_curve(const Command& cmd, const ParamSchedule& schedule) {
    const auto maturities = number_list(cmd.str("maturities"), "maturities");
    Table table;
    table.command = "curve";
    table.columns = {"maturity", "discount"};
    for (const auto& point : discount_curve(schedule, maturities)) table.rows.push_back({point.maturity, point.discount});
    return table;
}

Report cmd_forward(const Command& cmd, const ParamSchedule& schedule) {
    ForwardSpec spec;
    spec.t = cmd.num("t");
    spec.t_mat = cmd.num("maturity");
    spec.v0 = cmd.num("v0");
    const double spot = cmd.has("spot") ? cmd.num("spot") : schedule.a0();
    Report report;
    report.fields["command"] = "forward";
    report.fields["t"] = spec.t;
    report.fields["maturity"] = spec.t_mat;
    report.fields["spot"] = spot;
    report.fields["v0"] = spec.v0;
    report.fields["bond_price"] = zcb_price(schedule, spec.t, spec.t_mat);
    report.fields["forward_price"] = forward_price(schedule, spec, spot);
    return report;
}

Report cmd_futures(const Command& cmd, const ParamSchedule& schedule) {
    const double t = cmd.num("t");
    const double t_mat = cmd.num("maturity");
    const double spot = cmd.has("spot") ? cmd.num("spot") : schedule.a0();
    const PriceResult result = futures_price(schedule, t, t_mat, spot, mc_config(cmd));
    Report report;
    report.fields["command"] = "futures";
    report.fields["t"] = t;
    report.fields["maturity"] = t_mat;
    report.fields["spot"] = spot;
    report.fields["forward_price"] = forward_price(schedule, {t, t_mat, 0.0}, spot);
    add_result(report, result);
    return report;
}

Report cmd_perpetual(const Command& cmd, const ParamSchedule& schedule) {
    PerpetualSpec spec;
    spec.params = schedule.at(0.0);
    spec.gamma = cmd.num("gamma");
    spec.w0 = cmd.num("w0");
    spec.h0 = cmd.num("h0");
    spec.validate();
    const double x = cmd.has("x") ? cmd.num("x") : schedule.a0();
    const double t = cmd.num("t");
    std::vector<double> xs, ts;
    for (int i = 0; i < 20; ++i) {
        xs.push_back(x * (0.5 + i / 19.0));
        ts.push_back(t + i / 19.0);
    }
    Report report;
    report.fields["command"] = "perpetual";
    report.fields["gamma"] = spec.gamma;
    report.fields["x"] = x;
    report.fields["t"] = t;
    report.fields["value"] = perpetual_value(spec, x, t);
    report.fields["h"] = perpetual_h(spec, t);
    report.fields["w"] = perpetual_w(spec, t);
    report.fields["xi"] = perpetual_xi(spec.params, spec.gamma, t);
    report.fields["d"] = perpetual_d(spec.params, t);
    report.fields["pde_residual"] = pde_residual(spec, xs, ts);
    return report;
}

Report cmd_calibrate(const Command& cmd, KeyValues& model_keys) {
    std::vector<std::string> stages;
    if (cmd.has("stages")) {
        std::stringstream in(cmd.str("stages"));
        std::string s;
        while (std::getline(in, s, ',')) {
            if (s != "drift" && s != "vol" && s != "pn" && s != "riskless") {
                fail(ErrorCode::InputError, "unknown calibration stage '" + s + "'");
            }
            stages.push_back(s);
        }
    } else {
        stages = {"drift", "vol", "pn"};
        if (cmd.has("quotes")) stages.push_back("riskless");
    }
    auto wants = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
    const bool needs_series = wants("drift") || wants("vol") || wants("pn");
    if (needs_series && !cmd.has("series")) {
        fail(ErrorCode::InputError, "usage: calibrate --series PATH is required for the drift, vol and pn stages");
    }
    if (wants("riskless") && !cmd.has("quotes")) {
        fail(ErrorCode::InputError, "usage: calibrate --quotes PATH is required for the riskless stage");
    }

    auto model_value = [&](const char* key, double fallback) {
        const auto it = model_keys.find(key);
        return it == model_keys.end() ? fallback : parse_double(it->second, key);
    };
    FixedCoefficients fixed{model_value("a", 0.0), model_value("mu", 0.0), model_value("v", 0.0),
                            model_value("sigma", 0.0), cmd.num("p_n")};
    Report report;
    report.fields["command"] = "calibrate";
    std::optional<PriceSeries> series;
    if (needs_series) series = load_price_series(cmd.str("series"));
    const std::size_t window = cmd.count("window");

    if (wants("drift")) {
        const CalibResult fit = calibrate_drift(*series, window);
        fixed.a = fit.value("a");
        fixed.mu = fit.value("mu");
        report.fields["a"] = fixed.a;
        report.fields["mu"] = fixed.mu;
        report.fields["drift_objective"] = fit.objective;
    }
    if (wants("vol")) {
        const CalibResult fit = calibrate_vol(*series, window);
        fixed.v = fit.value("v");
        fixed.sigma = fit.value("sigma");
        report.fields["v"] = fixed.v;
        report.fields["sigma"] = fixed.sigma;
        report.fields["vol_objective"] = fit.objective;
        report.fields["vol_constraint_active"] = fit.constraint_active;
    }
    if (wants("pn")) {
        fixed.p_n = estimate_pn(*series);
        report.fields["p_n"] = fixed.p_n;
    }
    if (wants("riskless")) {
        const double spot = cmd.has("spot")                ? cmd.num("spot")
                            : model_keys.count("a0") != 0 ? model_value("a0", 0.0)
                            : series                       ? series->prices.back()
                                                           : std::nan("");
        if (!std::isfinite(spot)) fail(ErrorCode::InputError, "riskless stage needs --spot or a0 in the config");
        const QuoteSheet sheet = load_quote_sheet(cmd.str("quotes"), spot);
        RisklessOptions options;
        options.tree_n = cmd.count("tree_n");
        const CalibResult fit = calibrate_riskless(sheet, fixed, options);
        report.fields["rho"] = fit.value("rho");
        report.fields["r"] = fit.value("r");
        report.fields["riskless_objective"] = fit.objective;
        report.fields["riskless_iterations"] = fit.iterations;
        report.fields["riskless_constraint_active"] = fit.constraint_active;
    }
    return report;
}

Table cmd_tree_dump(const Command& cmd, const ParamSchedule& schedule) {
    TreeSpec spec{schedule};
    spec.n = cmd.count("tree_n");
    spec.t_mat = cmd.num("maturity");
    spec.p_n = cmd.num("p_n");
    spec.mode = tree_mode(cmd.str("tree_mode"));
    Table table;
    table.command = "tree-dump";
    table.columns = {"step", "node_id", "A", "q", "disc"};
    const double nan = std::nan("");
    for (const auto& node : tree_nodes(spec)) {
        const bool terminal = node.k == spec.n;
        table.rows.push_back({static_cast<double>(node.k), static_cast<double>(node.id), node.a,
                              terminal ? nan : node.q, terminal ? nan : node.disc});
    }
    return table;
}

void add_tree_options(Command& cmd, const char* default_n) {
    cmd.option("tree_n", "tree steps", default_n)
        .option("p_n", "natural up-probability", "0.5")
        .choice("tree_mode", "tree construction", {"auto", "recombining", "exact", "bucketed"}, "auto");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pricing and calibration for the unified Bachelier / Black-Scholes-Merton model", "bbsm"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every command");

    std::vector<std::unique_ptr<Command>> commands;
    auto make = [&](const char* name, const char* description) -> Command& {
        commands.push_back(std::make_unique<Command>(app, name, description));
        return *commands.back();
    };

    Command& price = make("price", "price a European option");
    price.choice("method", "pricing method", {"closed-bsm", "closed-mb", "quasi-bbsm", "mc-q1", "mc-q2", "tree"},
                 "mc-q1")
        .choice("kind", "payoff", {"call", "put", "unit"}, "call")
        .option("strike", "strike price", "100")
        .option("maturity", "maturity in years", "1")
        .option("dividend", "continuous dividend yield", "0")
        .option("paths", "Monte Carlo paths", "100000")
        .option("steps", "time steps (0 = 252 per year)", "0")
        .option("bucket_points", "grid points per step for bucketed trees", "2049");
    add_tree_options(price, "200");

    Command& simulate = make("simulate", "simulate price paths and report per-time statistics");
    simulate.choice("measure", "drift", {"natural", "q1", "q2", "dividend-bond", "dividend-bank"}, "q1")
        .option("maturity", "horizon in years", "1")
        .option("paths", "paths", "1000")
        .option("steps", "time steps (0 = 252 per year)", "0")
        .option("dividend", "continuous dividend yield", "0");

    Command& curve = make("curve", "zero-coupon discount curve");
    curve.option("maturities", "comma-separated maturities in years", "0.25,0.5,1,2,5,10");

    Command& forward = make("forward", "forward price F(t, T)");
    forward.option("t", "valuation time", "0")
        .option("maturity", "delivery time", "1")
        .option("spot", "asset price at t (default a0)")
        .option("v0", "contract value at t", "0");

    Command& futures = make("futures", "futures price by simulation");
    futures.option("t", "valuation time", "0")
        .option("maturity", "delivery time", "1")
        .option("spot", "asset price at t (default a0)")
        .option("paths", "Monte Carlo paths", "100000")
        .option("steps", "time steps (0 = 252 per year)", "0");

    Command& perpetual = make("perpetual", "separable perpetual derivative x^gamma h(t) + w(t)");
    perpetual.option("gamma", "exponent", "1")
        .option("w0", "w(0)", "0")
        .option("h0", "h(0)", "1")
        .option("x", "asset price (default a0)")
        .option("t", "time", "0");

    Command& calibrate = make("calibrate", "fit coefficients from a price series and option quotes");
    calibrate.option("series", "price series CSV (date,price)")
        .option("quotes", "quote sheet CSV (maturity_years,strike,price,kind)")
        .option("stages", "comma-separated subset of drift,vol,pn,riskless")
        .option("window", "rolling window in trading days", "10")
        .option("tree_n", "tree steps for the riskless fit", "12")
        .option("p_n", "natural up-probability when the pn stage is skipped", "0.5")
        .option("spot", "spot price for the quotes (default a0, else last series price)");

    Command& dump = make("tree-dump", "list the nodes of a small tree");
    dump.option("maturity", "maturity in years", "1");
    add_tree_options(dump, "4");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    Command* cmd = nullptr;
    for (auto& c : commands) {
        if (c->app()->parsed()) cmd = c.get();
    }

    try {
        KeyValues kv = cmd->settings();
        KeyValues model_keys;
        for (const char* key : kModelKeys) {
            if (auto node = kv.extract(key)) model_keys.insert(std::move(node));
        }
        cmd->absorb(kv);

        std::ostringstream body;
        const std::string& name = cmd->name();
        if (name == "calibrate") {
            cmd_calibrate(*cmd, model_keys).render(body, cmd->format(Format::Json));
        } else {
            const ParamSchedule schedule = model_schedule(model_keys);
            if (name == "price") {
                cmd_price(*cmd, schedule).render(body, cmd->format(Format::Json));
            } else if (name == "simulate") {
                cmd_simulate(*cmd, schedule).render(body, cmd->format(Format::Json));
            } else if (name == "curve") {
                cmd_curve(*cmd, schedule).render(body, cmd->format(Format::Csv));
            } else if (name == "forward") {
                cmd_forward(*cmd, schedule).render(body, cmd->format(Format::Json));
            } else if (name == "futures") {
                cmd_futures(*cmd, schedule).render(body, cmd->format(Format::Json));
            } else if (name == "perpetual") {
                cmd_perpetual(*cmd, schedule).render(body, cmd->format(Format::Json));
            } else {
                cmd_tree_dump(*cmd, schedule).render(body, cmd->format(Format::Csv));
            }
        }

        if (cmd->out_path().empty()) {
            out << body.str();
        } else {
            std::ofstream file(cmd->out_path());
            if (!file) fail(ErrorCode::InputError, "cannot write " + cmd->out_path());
            file << body.str();
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace bbsm::cli
