#include "bbsm/robust_regression.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bbsm/error.hpp"

namespace bbsm {

namespace {

enum class Terms { Both, InterceptOnly, SlopeOnly, None };

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

void weighted_fit(std::span<const double> x, std::span<const double> y, const std::vector<double>& w, Terms terms,
                  double& b0, double& b1) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    b0 = b1 = 0.0;
    switch (terms) {
        case Terms::Both: {
            const double mx = sx / sw;
            const double my = sy / sw;
            const double vxx = sxx / sw - mx * mx;
            const double vxy = sxy / sw - mx * my;
            // A regressor with no spread leaves the slope unidentified; put it at 0.
            b1 = vxx > 1e-14 * (mx * mx + 1e-300) ? vxy / vxx : 0.0;
            b0 = my - b1 * mx;
            break;
        }
        case Terms::InterceptOnly: b0 = sy / sw; break;
        case Terms::SlopeOnly: b1 = sxx > 0.0 ? sxy / sxx : 0.0; break;
        case Terms::None: break;
    }
}

double huber_rho(double z) {
    const double a = std::abs(z);
    return a <= kHuberTuning ? 0.5 * z * z : kHuberTuning * (a - 0.5 * kHuberTuning);
}

LineFit irls(std::span<const double> x, std::span<const double> y, Terms terms) {
    require(x.size() == y.size(), ErrorCode::InvalidArgument, "x and y must have the same length");
    require(x.size() >= 2, ErrorCode::InsufficientData, "regression needs at least 2 points");
    const std::size_t n = x.size();
    double y_scale = 0.0;
    for (double v : y) y_scale = std::max(y_scale, std::abs(v));

    std::vector<double> w(n, 1.0), resid(n), abs_resid(n);
    LineFit fit;
    weighted_fit(x, y, w, terms, fit.intercept, fit.slope);
    for (fit.iterations = 1; fit.iterations <= kHuberMaxIterations; ++fit.iterations) {
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = y[i] - fit.intercept - fit.slope * x[i];
            abs_resid[i] = std::abs(resid[i]);
        }
        fit.scale = median(abs_resid) / 0.6744897501960817;
        if (fit.scale <= 1e-13 * y_scale || fit.scale == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = abs_resid[i] / fit.scale;
            w[i] = z <= kHuberTuning ? 1.0 : kHuberTuning / z;
        }
        double b0 = 0.0, b1 = 0.0;
        weighted_fit(x, y, w, terms, b0, b1);
        const bool done = std::abs(b0 - fit.intercept) <= 1e-10 * (std::abs(b0) + y_scale) &&
                          std::abs(b1 - fit.slope) * (std::abs(x[0]) + 1.0) <= 1e-10 * (std::abs(b0) + y_scale);
        fit.intercept = b0;
        fit.slope = b1;
        if (done) break;
    }
    fit.iterations = std::min(fit.iterations, kHuberMaxIterations);
    double sw = 0.0, swr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sw += w[i];
        swr += w[i] * r * r;
    }
    fit.objective = swr / sw;
    return fit;
}

double huber_loss(const LineFit& fit, std::span<const double> x, std::span<const double> y, double scale) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        loss += scale > 0.0 ? huber_rho(r / scale) : r * r;
    }
    return loss;
}

}  // namespace

LineFit huber_line(std::span<const double> x, std::span<const double> y) { return irls(x, y, Terms::Both); }

LineFit huber_line_nonnegative(std::span<const double> x, std::span<const double> y) {
    LineFit best = irls(x, y, Terms::Both);
    if (best.intercept >= 0.0 && best.slope >= 0.0) return best;
    // Judge the bound cases on a common scale: the unconstrained one.
    const double scale = best.scale;
    bool have = false;
    double best_loss = 0.0;
    for (Terms terms : {Terms::InterceptOnly, Terms::SlopeOnly, Terms::None}) {
        LineFit fit = irls(x, y, terms);
        if (fit.intercept < 0.0 || fit.slope < 0.0) continue;
        const double loss = huber_loss(fit, x, y, scale);
        if (!have || loss < best_loss) {
            have = true;
            best_loss = loss;
            fit.constrained = true;
            best = fit;
        }
    }
    return best;
}

}  // namespace bbsm
