#include <cmath>

#include "bbsm/closed_form.hpp"
#include "bbsm/mc_pricer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bbsm;
using Catch::Approx;
using test::code_of;
using test::mk;

namespace {

McConfig cfg(std::size_t n_paths, std::uint64_t seed) {
    McConfig c;
    c.n_paths = n_paths;
    c.seed = seed;
    return c;
}

const auto unit = [](double) { return 1.0; };
const auto zero = [](double) { return 0.0; };

}  // namespace

TEST_CASE("unit payoff prices the bond-unit discount exactly", "[mc_pricer]") {
    const ParamSchedule sched({0.0, 0.5}, {mk(1, 0.05, 5, 0.1, 1, 0.03), mk(1, 0.05, 5, 0.1, -2, 0.01)});
    for (const ParamSchedule& s : {ParamSchedule(test::general()), sched}) {
        const auto res = price_q1(s, OptionSpec::custom(unit, 1.5), cfg(2000, 1));
        CHECK(res.std_error == 0.0);
        CHECK(res.price == Approx(deflators(s, 1.5).d1).epsilon(1e-12));
    }
}

TEST_CASE("bond-unit Monte Carlo matches the BSM and MB limits", "[mc_pricer]") {
    const auto bs = price_q1(test::bsm(0.1, 0.2, 0.05), OptionSpec::call(100, 1), cfg(100000, 2));
    CHECK(std::abs(bs.price - oracle::bs_call(100, 100, 0.05, 0.2, 1)) < 3 * bs.std_error);
    const auto mbp = price_q1(test::mb(10, 1), OptionSpec::call(95, 1), cfg(100000, 3));
    CHECK(std::abs(mbp.price - mb_call({100, 95, 1, 10, 1})) < 3 * mbp.std_error);
    CHECK(mbp.method == "mc-q1");
    CHECK(mbp.n_steps == 252);
}

TEST_CASE("bank convention with zero payoff is the accrual term", "[mc_pricer]") {
    const auto res = price_q2_bank(test::general(), OptionSpec::custom(zero, 2), cfg(1000, 1));
    CHECK(res.std_error == 0.0);
    CHECK(res.price == Approx(-1.0 * (1 - std::exp(-0.06)) / 0.03).epsilon(1e-12));
    CHECK(res.negative_price);
    const auto r0 = price_q2_bank(test::mb(10, 2), OptionSpec::custom(zero, 1.5), cfg(1000, 1));
    CHECK(r0.price == Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("conventions coincide path by path when rho = 0", "[mc_pricer][property]") {
    const auto p = mk(1, 0.05, 5, 0.1, 0, 0.03);
    for (double k : {90.0, 100.0, 110.0}) {
        for (double t : {0.5, 1.0, 2.0}) {
            const auto opt = OptionSpec::call(k, t);
            const auto a = sample_q1(p, opt, cfg(20000, 4));
            const auto b = sample_q2_bank(p, opt, cfg(20000, 4));
            CHECK(paired_difference(a, b).max_abs < 1e-10 * p.a0);
        }
    }
}

TEST_CASE("conventions separate when rho != 0", "[mc_pricer]") {
    const auto opt = OptionSpec::call(100, 1);
    const auto a = sample_q1(test::general(), opt, cfg(100000, 5));
    const auto b = sample_q2_bank(test::general(), opt, cfg(100000, 5));
    const auto d = paired_difference(a, b);
    CHECK(std::abs(d.mean) > 3 * d.std_error);
}

TEST_CASE("bond-unit put-call parity on common paths", "[mc_pricer][property]") {
    for (const auto& p : {test::general(), test::bsm(0.1, 0.2, 0.05), test::mb(10, 1)}) {
        for (double k : {90.0, 100.0, 110.0}) {
            for (double t : {0.5, 1.0}) {
                const auto c = sample_q1(p, OptionSpec::call(k, t), cfg(20000, 6));
                const auto put = sample_q1(p, OptionSpec::put(k, t), cfg(20000, 6));
                const auto d = paired_difference(c, put);
                CHECK(std::abs(d.mean - (p.a0 - k * deflators(p, t).d1)) < 3 * d.std_error);
            }
        }
    }
}

TEST_CASE("bank-convention accrual cancels in call minus put", "[mc_pricer][property]") {
    const auto opt_c = OptionSpec::call(105, 1);
    const auto opt_p = OptionSpec::put(105, 1);
    const auto fwd = OptionSpec::custom([](double x) { return x - 105; }, 1);
    const auto c = sample_q2_bank(test::general(), opt_c, cfg(20000, 7));
    const auto put = sample_q2_bank(test::general(), opt_p, cfg(20000, 7));
    const auto f = sample_q2_bank(test::general(), fwd, cfg(20000, 7));
    const auto d = paired_difference(c, put);
    double plain = 0.0;
    for (double v : f.values) plain += v;
    plain /= static_cast<double>(f.values.size());
    CHECK(c.offset == put.offset);
    CHECK(d.mean == Approx(plain).epsilon(1e-10));
}

TEST_CASE("dividend pricing", "[mc_pricer]") {
    auto opt = OptionSpec::call(100, 1);
    const auto q1 = price_q1(test::general(), opt, cfg(40000, 8));
    const auto bond0 = price_dividend(test::general(), opt, Convention::Bond, cfg(40000, 8));
    CHECK(std::abs(bond0.price - q1.price) <= 3 * q1.std_error);

    opt.dividend_yield = 0.02;
    const auto bs = price_dividend(test::bsm(0.1, 0.2, 0.05), opt, Convention::Bond, cfg(100000, 9));
    CHECK(std::abs(bs.price - oracle::bs_call(100, 100, 0.05, 0.2, 1, 0.02)) < 3 * bs.std_error);
    const auto bs_bank = price_dividend(test::bsm(0.1, 0.2, 0.05), opt, Convention::Bank, cfg(100000, 9));
    CHECK(bs_bank.price == Approx(bs.price).epsilon(1e-10));

    opt.dividend_yield = 0.01;
    const auto mbd = price_dividend(test::mb(10, 1), opt, Convention::Bond, cfg(100000, 10));
    const auto ref = oracle::mb_dividend_call(100, 100, 10, 1, 0.01, 1, 100000, 252, 99);
    CHECK(std::abs(mbd.price - ref.mean) < 3 * std::hypot(mbd.std_error, ref.se));
}

TEST_CASE("mixed deflator reductions", "[mc_pricer]") {
    const auto opt = OptionSpec::call(100, 1);
    const auto c0 = price_mixed_deflator(test::general(), opt, {0.0}, cfg(20000, 11));
    const auto q1_rho0 = price_q1(mk(1, 0.05, 5, 0.1, 0, 0.03), opt, cfg(20000, 11));
    CHECK(c0.price == Approx(q1_rho0.price).epsilon(1e-12));

    const auto c1 = sample_mixed_deflator(test::general(), opt, {1.0}, cfg(20000, 12));
    const auto bank = sample_q2_bank(test::general(), opt, cfg(20000, 12));
    CHECK(c1.values == bank.values);
    CHECK(c1.offset == bank.offset);

    const auto c2 = price_mixed_deflator(test::general(), OptionSpec::custom(zero, 1), {2.0}, cfg(100, 1));
    CHECK(c2.price == Approx(-2.0 * (1 - std::exp(-0.03)) / 0.03).epsilon(1e-12));
}

TEST_CASE("direct combined-deflator simulation is a martingale", "[mc_pricer]") {
    for (double c : {0.5, 1.0, 2.0}) {
        const auto res = price_mixed_deflator_direct(test::general(), OptionSpec::custom([](double x) { return x; }, 1),
                                                     {c}, cfg(40000, 13));
        CHECK(std::abs(res.price - 100.0) < 3 * res.std_error);
    }
}

TEST_CASE("finite-difference delta", "[mc_pricer]") {
    const auto bs = delta_fd(test::bsm(0.1, 0.2, 0.05), OptionSpec::call(100, 1), Convention::Bond, 0.01,
                             cfg(100000, 14));
    CHECK(std::abs(bs.value - bsm_delta(100, 100, 0.05, 0.2, 1)) < 3 * bs.std_error + 1e-3);
    CHECK(std::abs(bs.value - 0.6368) < 3 * bs.std_error + 1e-3);

    const auto itm = delta_fd(test::bsm(0.1, 0.05, 0.05), OptionSpec::call(20, 1), Convention::Bond, 0.01,
                              cfg(20000, 15));
    CHECK(std::abs(itm.value - 1.0) < 3 * itm.std_error + 1e-6);

    const auto flat = delta_fd(test::general(), OptionSpec::custom(unit, 1), Convention::Bank, 0.01, cfg(1000, 1));
    CHECK(flat.value == 0.0);
    CHECK(code_of([] { delta_fd(test::general(), OptionSpec::call(100, 1), Convention::Bond, 0.0, {}); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("results are reproducible and execution-independent", "[mc_pricer][determinism]") {
    const auto opt = OptionSpec::call(100, 1);
    auto c = cfg(5000, 16);
    const auto a = price_q2_bank(test::general(), opt, c);
    CHECK(price_q2_bank(test::general(), opt, c) == a);
    c.execution = Execution::Serial;
    CHECK(price_q2_bank(test::general(), opt, c) == a);
}

TEST_CASE("standard error halves when paths quadruple", "[mc_pricer][property]") {
    const auto opt = OptionSpec::call(100, 1);
    const auto small = price_q1(test::general(), opt, cfg(10000, 17));
    const auto big = price_q1(test::general(), opt, cfg(40000, 18));
    const double ratio = small.std_error / big.std_error;
    CHECK(ratio > 2.0 * 0.8);
    CHECK(ratio < 2.0 * 1.2);
}

TEST_CASE("bank convention flags negative prices", "[mc_pricer]") {
    const auto res = price_q2_bank(test::mb(10, 20), OptionSpec::call(150, 1), cfg(10000, 19));
    CHECK(res.price < 0.0);
    CHECK(res.negative_price);
}

TEST_CASE("pricing errors propagate", "[mc_pricer][guard]") {
    // additive drift -c rho drives A through -v / sigma
    CHECK(code_of([] {
              price_mixed_deflator_direct(test::general(), OptionSpec::call(100, 1), {1000.0}, cfg(1000, 1));
          }) == ErrorCode::ExcessPsiViolations);
    CHECK(code_of([] { price_q1(mk(0, 0.2, 10, 0.1, -10, 0.05), OptionSpec::call(100, 14), cfg(10, 1)); }) ==
          ErrorCode::MaturityRestriction);
    CHECK(code_of([] { price_q1(test::general(), OptionSpec::call(-1, 1), cfg(10, 1)); }) ==
          ErrorCode::InvalidArgument);
}
