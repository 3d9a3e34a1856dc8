#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "bbsm/simulation.hpp"

namespace bbsm {

enum class OptionKind { Call, Put, Custom };

struct OptionSpec {
    OptionKind kind = OptionKind::Call;
    double strike = 100.0;
    double maturity = 1.0;
    std::function<double(double)> payoff;  // used when kind == Custom
    double dividend_yield = 0.0;

    static OptionSpec call(double strike, double maturity);
    static OptionSpec put(double strike, double maturity);
    static OptionSpec custom(std::function<double(double)> payoff, double maturity);

    double value(double a_T) const;
    void validate() const;
};

struct McConfig {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 0;  // 0 selects the default grid
    std::uint64_t seed = 0;
    Execution execution = Execution::Parallel;
};

struct PriceResult {
    double price = 0.0;
    double std_error = 0.0;
    std::string method;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t psi_violations = 0;
    bool negative_price = false;

    friend bool operator==(const PriceResult&, const PriceResult&) = default;
};

}  // namespace bbsm
