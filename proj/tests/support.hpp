#pragma once

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "bbsm/error.hpp"
#include "bbsm/model.hpp"

namespace test {

inline bbsm::ModelParams mk(double a, double mu, double v, double sigma, double rho, double r, double a0 = 100.0) {
    return {a, mu, v, sigma, rho, r, a0};
}

inline bbsm::ModelParams bsm(double mu, double sigma, double r, double a0 = 100.0) {
    return mk(0, mu, 0, sigma, 0, r, a0);
}

// MB sub-model; the natural drift a only has to clear the no-arbitrage bound.
inline bbsm::ModelParams mb(double v, double rho, double a0 = 100.0) {
    return mk(std::abs(rho) + 1, 0, v, 0, rho, 0, a0);
}

// Generic BBSM instance used across the pricing tests.
inline bbsm::ModelParams general() { return mk(1, 0.05, 5, 0.1, 1, 0.03); }

inline bbsm::ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const bbsm::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return bbsm::ErrorCode::InvalidArgument;
}

}  // namespace test
