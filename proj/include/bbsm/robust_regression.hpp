#pragma once

#include <cstddef>
#include <span>

namespace bbsm {

inline constexpr double kHuberTuning = 1.345;
inline constexpr std::size_t kHuberMaxIterations = 50;

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double scale = 0.0;     // MAD-based residual scale at the last iteration
    double objective = 0.0; // mean weighted squared residual
    std::size_t iterations = 0;
    bool constrained = false;  // a nonnegativity bound is active
};

/// Huber-weighted IRLS fit of y = intercept + slope x.
LineFit huber_line(std::span<const double> x, std::span<const double> y);

/// Same fit with intercept >= 0 and slope >= 0; bound cases are refitted on
/// the reduced model and the lowest Huber loss wins.
LineFit huber_line_nonnegative(std::span<const double> x, std::span<const double> y);

}  // namespace bbsm
