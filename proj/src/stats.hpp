#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace bbsm::detail {

struct MeanSe {
    double mean = 0.0;
    double std_error = 0.0;
};

// Two-pass sample mean and standard error. A constant sample returns its
// value exactly with zero error.
inline MeanSe mean_se(std::span<const double> x) {
    MeanSe out;
    if (x.empty()) return out;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) {
        out.mean = *lo;
        return out;
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    out.mean = sum / static_cast<double>(x.size());
    if (x.size() < 2) return out;
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    const double n = static_cast<double>(x.size());
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

}  // namespace bbsm::detail
