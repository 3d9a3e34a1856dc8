#pragma once

#include <algorithm>
#include <limits>

#include "bbsm/model.hpp"

namespace bbsm::detail {

double beta_after(double beta_start, double rho, double r, double tau) noexcept;
double rho_over_beta_integral(double beta_start, double rho, double r, double tau) noexcept;
double hit_time(double beta_start, double rho, double r) noexcept;

/// Calls fn(start, length, params) for each constant-coefficient piece of [t0, t1].
template <class Fn>
void for_each_segment(const ParamSchedule& schedule, double t0, double t1, Fn&& fn) {
    const auto bps = schedule.breakpoints();
    const auto params = schedule.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double lo = std::max(bps[i], t0);
        const double hi = std::min(i + 1 < params.size() ? bps[i + 1]
                                                         : std::numeric_limits<double>::infinity(),
                                   t1);
        if (hi > lo) fn(lo, hi - lo, params[i]);
        if (i + 1 < params.size() && bps[i + 1] >= t1) break;
    }
}

}  // namespace bbsm::detail
