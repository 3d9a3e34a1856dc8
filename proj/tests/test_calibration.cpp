#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "bbsm/binomial.hpp"
#include "bbsm/calibration.hpp"
#include "bbsm/closed_form.hpp"
#include "bbsm/csv.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace bbsm;
using Catch::Approx;
using test::code_of;
using test::mk;

namespace {

const FixedCoefficients kFixed{1.0, 0.05, 5.0, 0.1, 0.5};

QuoteSheet tree_quotes(double rho, double r, std::size_t n) {
    QuoteSheet sheet;
    for (double t : {0.5, 1.0}) {
        for (double k : {90.0, 95.0, 105.0, 110.0}) {
            TreeSpec spec{ParamSchedule(mk(kFixed.a, kFixed.mu, kFixed.v, kFixed.sigma, rho, r))};
            spec.n = n;
            spec.t_mat = t;
            const auto opt = k < 100 ? OptionSpec::put(k, t) : OptionSpec::call(k, t);
            sheet.quotes.push_back({t, k, tree_price(spec, opt), k < 100 ? OptionKind::Put : OptionKind::Call});
        }
    }
    return sheet;
}

}  // namespace

TEST_CASE("drift fit on deterministic series", "[calibration]") {
    std::vector<double> lin, flat(300, 80.0);
    for (int k = 0; k <= 300; ++k) lin.push_back(100 + 3.0 * k / kTradingDaysPerYear);
    const auto d = calibrate_drift(PriceSeries::daily(lin));
    CHECK(std::abs(d.value("a") - 3.0) < 1e-9);
    CHECK(std::abs(d.value("mu")) < 1e-9);
    const auto c = calibrate_drift(PriceSeries::daily(flat));
    CHECK(c.value("a") == 0.0);
    CHECK(c.value("mu") == 0.0);
    const auto v = calibrate_vol(PriceSeries::daily(flat));
    CHECK(v.value("v") == 0.0);
    CHECK(v.value("sigma") == 0.0);
    CHECK(code_of([] { calibrate_drift(PriceSeries::daily(std::vector<double>(11, 1.0))); }) ==
          ErrorCode::InsufficientData);
    CHECK(code_of([] { calibrate_vol(PriceSeries::daily({1.0})); }) == ErrorCode::InsufficientData);
}

TEST_CASE("seed-averaged drift recovery on 2000-step histories", "[calibration][statistical]") {
    const auto truth = test::general();
    double a_sum = 0.0, mu_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto fit = calibrate_drift(synth::natural_series(truth, 2000, seed));
        a_sum += fit.value("a");
        mu_sum += fit.value("mu");
    }
    CHECK(std::abs(a_sum / 5 - truth.a) <= 0.25 * truth.a);
    CHECK(std::abs(mu_sum / 5 - truth.mu) <= 0.25 * truth.mu);
}

TEST_CASE("seed-averaged volatility recovery on 2000-step histories", "[calibration][statistical]") {
    const auto truth = test::general();
    double v_sum = 0.0, s_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto series = synth::natural_series(truth, 2000, seed);
        const auto fit = calibrate_vol(series);
        v_sum += fit.value("v");
        s_sum += fit.value("sigma");
        const auto [lo, hi] = synth::price_range(series);
        CHECK(synth::line_l2_rel(fit.value("v"), fit.value("sigma"), truth.v, truth.sigma, lo, hi, true) < 0.25);
    }
    CHECK(std::abs(v_sum / 5 - truth.v) <= 0.25 * truth.v);
    CHECK(std::abs(s_sum / 5 - truth.sigma) <= 0.25 * truth.sigma);
}

TEST_CASE("volatility fit in the GBM and ABM limits", "[calibration]") {
    const auto gbm = calibrate_vol(synth::natural_series(test::bsm(0.05, 0.2, 0.0), 2000, 31));
    CHECK(gbm.value("sigma") == Approx(0.2).epsilon(0.2));
    CHECK(gbm.value("v") < 0.2 * 0.2 * 100);
    CHECK(gbm.value("v") >= 0.0);
    const auto abm = calibrate_vol(synth::natural_series(mk(0.5, 0, 10, 0, 0, 0), 2000, 32));
    CHECK(abm.value("v") == Approx(10.0).epsilon(0.2));
    CHECK(abm.value("sigma") < 0.02);
    CHECK(abm.value("sigma") >= 0.0);
}

TEST_CASE("calibration is scale equivariant", "[calibration][property]") {
    const auto series = synth::natural_series(test::general(), 1000, 7);
    auto scaled = series;
    for (double& x : scaled.prices) x *= 3.0;
    const auto d = calibrate_drift(series), ds = calibrate_drift(scaled);
    const auto v = calibrate_vol(series), vs = calibrate_vol(scaled);
    CHECK(ds.value("a") == Approx(3 * d.value("a")).epsilon(1e-8));
    CHECK(ds.value("mu") == Approx(d.value("mu")).epsilon(1e-8));
    CHECK(vs.value("v") == Approx(3 * v.value("v")).epsilon(1e-8));
    CHECK(vs.value("sigma") == Approx(v.value("sigma")).epsilon(1e-8));
}

TEST_CASE("up-move probability", "[calibration]") {
    std::vector<double> up, alt;
    for (int i = 0; i <= 20; ++i) {
        up.push_back(i);
        alt.push_back(i % 2);
    }
    CHECK(estimate_pn(PriceSeries::daily(up)) == Approx(1 - 1.0 / 20));
    CHECK(estimate_pn(PriceSeries::daily(alt)) == 0.5);
    CHECK(estimate_pn(PriceSeries::daily({1, 1, 2, 3, 3})) == 0.75);

    std::mt19937_64 gen(2024);
    std::bernoulli_distribution coin(0.6);
    std::vector<double> walk{100};
    for (int i = 0; i < 5000; ++i) walk.push_back(walk.back() + (coin(gen) ? 1.0 : -1.0));
    CHECK(std::abs(estimate_pn(PriceSeries::daily(walk)) - 0.6) < 0.02);
    CHECK(code_of([] { estimate_pn(PriceSeries::daily({1, 2})); }) == ErrorCode::InsufficientData);
}

TEST_CASE("riskless fit recovers self-generated quotes", "[calibration]") {
    const auto sheet = tree_quotes(1.0, 0.03, 12);
    const auto fit = calibrate_riskless(sheet, kFixed);
    CHECK(fit.objective < 1e-8);
    CHECK(std::abs(fit.value("r") - 0.03) < 1e-3);
    CHECK(std::abs(fit.value("rho") - 1.0) < 0.1);
    CHECK(fit.value("rho") + fit.value("r") * sheet.a0 < kFixed.a + kFixed.mu * sheet.a0);
    CHECK_FALSE(fit.constraint_active);
    CHECK(riskless_objective(sheet, kFixed, {}, 1.0, 0.03) < 1e-24);
}

TEST_CASE("riskless fit on Black-Scholes quotes", "[calibration]") {
    // rho and r only separate through the growth of beta, so the quotes span
    // 1 to 5 years and the tree is fine enough that its bias stays below 1e-3 in r.
    QuoteSheet sheet;
    for (double t : {1.0, 5.0}) {
        for (double k : {90.0, 110.0}) sheet.quotes.push_back({t, k, bsm_call(100, k, 0.03, 0.2, t)});
    }
    RisklessOptions opt;
    opt.tree_n = 800;
    const auto fit = calibrate_riskless(sheet, {0.0, 0.1, 0.0, 0.2, 0.5}, opt);
    CHECK(std::abs(fit.value("r") - 0.03) < 1e-3);
    CHECK(std::abs(fit.value("rho")) < 0.1);
}

TEST_CASE("riskless fit respects the no-arbitrage restriction", "[calibration][property]") {
    // quotes that want a riskless drift above the asset drift
    const FixedCoefficients low{0.0, 0.02, 0.0, 0.2, 0.5};
    QuoteSheet sheet;
    for (double k : {95.0, 105.0}) sheet.quotes.push_back({1.0, k, bsm_call(100, k, 0.06, 0.2, 1.0)});
    const auto fit = calibrate_riskless(sheet, low);
    CHECK(fit.value("rho") + fit.value("r") * sheet.a0 < low.a + low.mu * sheet.a0);

    CHECK(code_of([] {
              QuoteSheet one;
              one.quotes.push_back({1.0, 100.0, 10.0});
              calibrate_riskless(one, kFixed);
          }) == ErrorCode::InsufficientData);
}

TEST_CASE("ESG price adjustment", "[calibration]") {
    CHECK(esg_adjust({100, 20, 50, 2}) == Approx(-20.0).epsilon(1e-14));
    CHECK(esg_adjust({100, 20, 50, 0}) == 100.0);
    CHECK(esg_adjust({100, 50, 50, 3}) == 100.0);
    CHECK(esg_adjust({80, 75, 50, 1}) == Approx(120.0).epsilon(1e-14));
    CHECK(code_of([] { esg_adjust({100, 20, 0, 1}); }) == ErrorCode::ZeroIndexScore);
    CHECK(code_of([] { esg_adjust({100, 120, 50, 1}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("CSV readers", "[calibration][io]") {
    const std::string dir = BBSM_TEST_DATA;
    const auto series = load_price_series(dir + "/series_bbsm.csv");
    CHECK(series.prices.size() == 2001);
    CHECK(series.prices.front() == 100.0);
    CHECK(series.times[1] == 1.0);
    const auto sheet = load_quote_sheet(dir + "/quotes_bbsm.csv", 100.0);
    CHECK(sheet.quotes.size() == 8);
    CHECK(sheet.quotes[0].kind == OptionKind::Put);
    CHECK(sheet.quotes[1].strike == 110.0);

    CHECK(code_of([&] { load_price_series(dir + "/empty.csv"); }) == ErrorCode::InputError);
    CHECK(code_of([&] { load_quote_sheet(dir + "/empty.csv", 100); }) == ErrorCode::InputError);
    CHECK(code_of([] { load_price_series("/nonexistent/x.csv"); }) == ErrorCode::InputError);
    std::istringstream bad_header("day,price\n2020-01-01,1\n");
    CHECK(code_of([&] { read_price_series(bad_header); }) == ErrorCode::InputError);
    std::istringstream bad_kind("maturity_years,strike,price,kind\n1,100,5,straddle\n");
    CHECK(code_of([&] { read_quote_sheet(bad_kind, 100); }) == ErrorCode::InputError);
    std::istringstream unordered("date,price\n2020-01-02,1\n2020-01-01,2\n");
    CHECK(code_of([&] { read_price_series(unordered); }) == ErrorCode::InputError);
}

TEST_CASE("fixture quotes are recovered with the fixture coefficients", "[calibration][io]") {
    const auto sheet = load_quote_sheet(std::string(BBSM_TEST_DATA) + "/quotes_bbsm.csv", 100.0);
    const auto fit = calibrate_riskless(sheet, kFixed);
    CHECK(fit.objective < 1e-8);
    CHECK(std::abs(fit.value("r") - 0.03) < 1e-3);
}
