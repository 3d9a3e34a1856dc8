#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bbsm/model.hpp"
#include "bbsm/term_structure.hpp"
#include "cli.hpp"
#include "support.hpp"

using Catch::Approx;
using Json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bbsm::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> model_args(double a, double mu, double v, double sigma, double rho, double r,
                                    double a0 = 100) {
    std::vector<std::string> out;
    const std::pair<const char*, double> keys[] = {{"a", a},     {"mu", mu}, {"v", v},  {"sigma", sigma},
                                                   {"rho", rho}, {"r", r},   {"a0", a0}};
    for (const auto& [k, x] : keys) {
        std::ostringstream s;
        s.precision(17);
        s << k << '=' << x;
        out.push_back("--set");
        out.push_back(s.str());
    }
    return out;
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

const std::string kData = BBSM_TEST_DATA;
const auto kBsm = model_args(0, 0.1, 0, 0.2, 0, 0.05);
const auto kGeneral = model_args(1, 0.05, 5, 0.1, 1, 0.03);

}  // namespace

TEST_CASE("closed-form Black-Scholes through the CLI", "[cli]") {
    const auto r = run(cat({"price", "--method", "closed-bsm"}, kBsm));
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["price"].get<double>() == Approx(10.4506).margin(5e-5));
    CHECK(doc["std_error"].get<double>() == 0.0);
    CHECK(doc["method"] == "closed-bsm");
}

TEST_CASE("unit payoff reproduces the curve discount", "[cli]") {
    const auto r = run(cat({"price", "--method", "mc-q1", "--kind", "unit", "--maturity", "2", "--paths", "500"}, kGeneral));
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["std_error"].get<double>() == 0.0);
    const auto c = run(cat({"curve", "--maturities", "2", "--format", "json"}, kGeneral));
    REQUIRE(c.code == 0);
    const double discount = Json::parse(c.out)["rows"][0]["discount"].get<double>();
    CHECK(doc["price"].get<double>() == Approx(discount).epsilon(1e-12));
    CHECK(discount == Approx(bbsm::zcb_price(bbsm::ParamSchedule(test::general()), 0, 2)).epsilon(1e-14));
}

TEST_CASE("curve rows", "[cli]") {
    const auto exp_curve = run(cat({"curve", "--maturities", "1,2"}, model_args(0, 0.1, 0, 0.2, 0, 0.05)));
    REQUIRE(exp_curve.code == 0);
    std::istringstream lines(exp_curve.out);
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(header == "maturity,discount");
    CHECK(std::stod(row1.substr(row1.find(',') + 1)) == Approx(std::exp(-0.05)).epsilon(1e-15));
    CHECK(std::stod(row2.substr(row2.find(',') + 1)) == Approx(std::exp(-0.10)).epsilon(1e-15));

    const auto mb = run(cat({"curve", "--maturities", "2", "--format", "json"}, model_args(2, 0, 1, 0, 1, 0)));
    REQUIRE(mb.code == 0);
    CHECK(Json::parse(mb.out)["rows"][0]["discount"].get<double>() == Approx(100.0 / 102.0).epsilon(1e-14));
}

TEST_CASE("maturity restriction exits with a model error", "[cli][guard]") {
    // r = .05, rho = -10, beta_0 = 100: beta hits zero at ln 2 / .05 = 13.86
    const auto r = run(cat({"curve", "--maturities", "1,14"}, model_args(0, 0.2, 10, 0.1, -10, 0.05)));
    CHECK(r.code == 3);
    CHECK(r.err.find("MaturityRestriction") != std::string::npos);
    CHECK(r.out.empty());
    const auto ok = run(cat({"curve", "--maturities", "1,13.8"}, model_args(0, 0.2, 10, 0.1, -10, 0.05)));
    CHECK(ok.code == 0);
}

TEST_CASE("exit-code matrix", "[cli][guard]") {
    struct Case {
        std::vector<std::string> args;
        int code;
    };
    const std::vector<Case> cases = {
        {cat({"price", "--method", "closed-mb", "--paths", "10"}, model_args(2, 0, 10, 0, 1, 0)), 0},
        {cat({"price", "--method", "tree", "--tree-n", "50", "--kind", "put"}, kBsm), 0},
        {cat({"price", "--method", "mc-q2", "--paths", "200"}, kGeneral), 0},
        {cat({"price", "--method", "quasi-bbsm", "--paths", "200", "--steps", "20"}, kGeneral), 0},
        {cat({"simulate", "--paths", "5", "--steps", "4", "--format", "csv"}, kGeneral), 0},
        {cat({"forward", "--maturity", "2"}, kGeneral), 0},
        {cat({"futures", "--paths", "200", "--steps", "10"}, kGeneral), 0},
        {cat({"perpetual", "--gamma", "2"}, model_args(1, 0.1, 0, 0.3, 2, 0.04)), 0},
        {cat({"tree-dump", "--tree-n", "2"}, kGeneral), 0},
        {{"--help"}, 0},
        // input and configuration errors
        {cat({"price", "--method", "nope"}, kBsm), 2},
        {{"price", "--method", "closed-bsm"}, 2},
        {cat({"price", "--strike", "abc"}, kBsm), 2},
        {cat({"price", "--set", "bogus=1"}, kBsm), 2},
        {cat({"price", "--set", "novalue"}, kBsm), 2},
        {cat({"price", "--config", "/nonexistent.cfg"}, kBsm), 2},
        {cat({"price", "--method", "closed-bsm", "--strike", "-5"}, kBsm), 2},
        {cat({"price", "--method", "closed-bsm", "--set", "tree_mode=sideways"}, kBsm), 2},
        {{"unknown-command"}, 2},
        {{}, 2},
        {{"calibrate", "--series", kData + "/empty.csv"}, 2},
        {{"calibrate", "--stages", "riskless"}, 2},
        {{"calibrate", "--stages", "drift,magic", "--series", kData + "/series_bbsm.csv"}, 2},
        // model and numerical errors
        {cat({"price", "--method", "mc-q1"}, model_args(0, 0.05, 0, 0.2, 0, 0.05)), 3},
        {cat({"perpetual"}, kGeneral), 3},
        {cat({"price", "--method", "closed-bsm"}, kGeneral), 2},
        {cat({"price", "--method", "closed-mb"}, model_args(2, 0, 10, 0, -100, 0)), 3},
        {cat({"price", "--method", "tree", "--tree-n", "1", "--maturity", "20"}, kBsm), 3},
    };
    for (const auto& c : cases) {
        const auto r = run(c.args);
        std::string joined;
        for (const auto& a : c.args) joined += a + ' ';
        INFO(joined << "\n" << r.err);
        CHECK(r.code == c.code);
        if (c.code != 0) {
            CHECK(r.out.empty());
            CHECK(r.err.rfind("error: ", 0) == 0);
        }
    }
}

TEST_CASE("identical inputs give byte-identical output", "[cli][determinism]") {
    const auto args = cat({"price", "--method", "mc-q2", "--paths", "2000", "--seed", "77", "--format", "csv"}, kGeneral);
    const auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto other = run(cat({"price", "--method", "mc-q2", "--paths", "2000", "--seed", "78", "--format", "csv"},
                               kGeneral));
    CHECK(other.out != a.out);
    const auto sim = cat({"simulate", "--paths", "50", "--steps", "10", "--seed", "3"}, kGeneral);
    CHECK(run(sim).out == run(sim).out);
}

TEST_CASE("config file, flags and output file", "[cli]") {
    const auto dir = std::filesystem::temp_directory_path() / "bbsm_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "model.cfg";
    {
        std::ofstream f(cfg);
        f << "# black-scholes limit\na = 0\nmu = 0.1\nv = 0\nsigma = 0.2\nrho = 0\nr = 0.05\na0 = 100\n"
          << "method = closed-bsm\nstrike = 90\n";
    }
    const auto from_cfg = run({"price", "--config", cfg.string(), "--format", "text"});
    REQUIRE(from_cfg.code == 0);
    CHECK(from_cfg.out.find("strike: 90") != std::string::npos);
    // flags win over the file
    const auto flag = run({"price", "--config", cfg.string(), "--strike", "100"});
    REQUIRE(flag.code == 0);
    CHECK(Json::parse(flag.out)["price"].get<double>() == Approx(10.4506).margin(5e-5));

    const auto out_file = dir / "price.json";
    const auto to_file = run({"price", "--config", cfg.string(), "--out", out_file.string()});
    REQUIRE(to_file.code == 0);
    CHECK(to_file.out.empty());
    std::ifstream in(out_file);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() == run({"price", "--config", cfg.string()}).out);
    CHECK(Json::parse(body.str())["strike"].get<double>() == 90.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("riskless calibration from the fixture quotes", "[cli][calibration]") {
    const auto r = run({"calibrate", "--stages", "riskless", "--config", kData + "/quotes_model.cfg", "--quotes",
                        kData + "/quotes_bbsm.csv"});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["riskless_objective"].get<double>() < 1e-8);
    CHECK(std::abs(doc["r"].get<double>() - 0.03) < 1e-3);
    CHECK(std::abs(doc["rho"].get<double>() - 1.0) < 0.1);
    CHECK(doc["riskless_constraint_active"] == false);
}

TEST_CASE("fixture series recovers the generator coefficients", "[cli][calibration][statistical]") {
    const auto r = run({"calibrate", "--series", kData + "/series_bbsm.csv", "--stages", "drift,vol,pn"});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(r.out);
    CHECK(doc["p_n"].get<double>() > 0.0);
    CHECK(doc["p_n"].get<double>() < 1.0);
    CHECK(std::abs(doc["a"].get<double>() - 1.0) <= 0.25 * 1.0);
    CHECK(std::abs(doc["mu"].get<double>() - 0.05) <= 0.25 * 0.05);
    CHECK(std::abs(doc["v"].get<double>() - 5.0) <= 0.25 * 5.0);
    CHECK(std::abs(doc["sigma"].get<double>() - 0.1) <= 0.25 * 0.1);
}
