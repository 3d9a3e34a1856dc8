#include "bbsm/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bbsm/error.hpp"

namespace bbsm {

void TreeSpec::validate() const {
    require(n >= 1, ErrorCode::InvalidArgument, "tree needs n >= 1");
    require(t_mat > 0.0 && std::isfinite(t_mat), ErrorCode::InvalidArgument, "maturity must be > 0");
    require(p_n > 0.0 && p_n < 1.0, ErrorCode::InvalidArgument, "p_n must lie in (0, 1)");
    require(bucket_points >= 3, ErrorCode::InvalidArgument, "bucketed tree needs at least 3 grid points");
}

Moves node_moves(const ModelParams& p, double a_k, double p_n, double delta) {
    require(p_n > 0.0 && p_n < 1.0, ErrorCode::InvalidArgument, "p_n must lie in (0, 1)");
    require(delta > 0.0, ErrorCode::InvalidArgument, "Delta must be > 0");
    const double psi = p.psi(a_k);
    if (!(psi > 0.0)) {
        fail(ErrorCode::DegenerateDiffusion, "psi = " + std::to_string(psi) + " at A = " + std::to_string(a_k));
    }
    const double mean = p.phi(a_k) * delta;
    const double spread = psi * std::sqrt(delta);
    return {mean + std::sqrt((1.0 - p_n) / p_n) * spread, mean - std::sqrt(p_n / (1.0 - p_n)) * spread};
}

namespace {

double q_unchecked(const ModelParams& p, double a_k, double beta_k, double p_n, double delta) {
    const double excess = p.phi(a_k) - p.chi(beta_k) * a_k / beta_k;
    return p_n - excess / p.psi(a_k) * std::sqrt(p_n * (1.0 - p_n) * delta);
}

}  // namespace

double risk_neutral_q(const ModelParams& p, double a_k, double beta_k, double p_n, double delta) {
    node_moves(p, a_k, p_n, delta);  // psi > 0
    require(beta_k > 0.0, ErrorCode::NonPositiveRiskless, "beta_k must be > 0");
    const double q = q_unchecked(p, a_k, beta_k, p_n, delta);
    if (!(q > 0.0 && q < 1.0)) {
        fail(ErrorCode::QOutOfRange, "q = " + std::to_string(q) + " at A = " + std::to_string(a_k) + "; reduce Delta");
    }
    return q;
}

double risk_neutral_q_ratio(const ModelParams& p, double a_k, double beta_k, double p_n, double delta) {
    const auto [u, d] = node_moves(p, a_k, p_n, delta);
    return (a_k / beta_k * p.chi(beta_k) * delta - d) / (u - d);
}

double mb_discount(double beta0, double rho, std::size_t k, double delta) {
    const double beta_k = beta0 + rho * static_cast<double>(k) * delta;
    require(beta_k > 0.0, ErrorCode::NonPositiveRiskless, "beta_0 + rho k Delta must be > 0");
    return 1.0 + rho * delta / beta_k;
}

double mb_discount_approx(double beta0, double rho, double delta) {
    require(beta0 > 0.0, ErrorCode::NonPositiveRiskless, "beta_0 must be > 0");
    return 1.0 + rho * delta / beta0;
}

namespace {

struct Step {
    ModelParams p;
    double beta;
    double disc;  // 1 / D_Delta
    // p_n and Delta are fixed per tree
    double sd;    // sqrt(Delta)
    double up_w;  // sqrt((1 - p_n) / p_n)
    double dn_w;  // sqrt(p_n / (1 - p_n))
    double q_w;   // sqrt(p_n (1 - p_n) Delta)
};

std::vector<Step> make_steps(const TreeSpec& spec) {
    const double delta = spec.delta();
    std::vector<Step> steps(spec.n);
    double beta = spec.params.a0();
    for (std::size_t k = 0; k < spec.n; ++k) {
        const ModelParams& p = spec.params.at(delta * static_cast<double>(k));
        const double chi = p.chi(beta);
        const double big_d = 1.0 + chi * delta / beta;
        if (!(big_d > 0.0)) {
            fail(ErrorCode::NonPositiveDiscount,
                 "D_Delta = " + std::to_string(big_d) + " at step " + std::to_string(k));
        }
        steps[k] = {p,         beta, 1.0 / big_d, std::sqrt(delta), std::sqrt((1.0 - spec.p_n) / spec.p_n),
                    std::sqrt(spec.p_n / (1.0 - spec.p_n)), std::sqrt(spec.p_n * (1.0 - spec.p_n) * delta)};
        beta += chi * delta;
        if (!(beta > 0.0)) {
            fail(ErrorCode::NonPositiveRiskless, "tree riskless value not positive at step " + std::to_string(k + 1));
        }
    }
    return steps;
}

struct Branch {
    double up;    // child price after an up move
    double down;  // child price after a down move
    double q;
};

// Same moves and q as node_moves and risk_neutral_q, with the per-tree
// constants taken from the step.
inline Branch branch(const Step& s, double a, double p_n, double delta) {
    const double psi = s.p.psi(a);
    if (!(psi > 0.0)) {
        fail(ErrorCode::DegenerateDiffusion, "psi = " + std::to_string(psi) + " at A = " + std::to_string(a));
    }
    const double phi = s.p.phi(a);
    const double mean = phi * delta;
    const double spread = psi * s.sd;
    const double q = p_n - (phi - s.p.chi(s.beta) * a / s.beta) / psi * s.q_w;
    if (!(q > 0.0 && q < 1.0)) {
        fail(ErrorCode::QOutOfRange, "q = " + std::to_string(q) + " at A = " + std::to_string(a) + "; reduce Delta");
    }
    return {a + (mean + s.up_w * spread), a + (mean - s.dn_w * spread), q};
}

inline double up_raw(const Step& s, double a, double delta) {
    return a + s.p.phi(a) * delta + s.up_w * s.p.psi(a) * s.sd;
}

inline double down_raw(const Step& s, double a, double delta) {
    return a + s.p.phi(a) * delta - s.dn_w * s.p.psi(a) * s.sd;
}

// Next lattice layer. Node j of layer k + 1 has j up moves; it is built as the
// down child of node j and, for the top node, the up child of node k. Returns
// false when the up child of node j - 1 lands elsewhere.
bool advance_layer(const Step& s, const std::vector<double>& layer, std::vector<double>& next, double delta,
                   double scale) {
    const std::size_t m = layer.size();
    next.resize(m + 1);
    for (std::size_t j = 0; j < m; ++j) next[j] = down_raw(s, layer[j], delta);
    next[m] = up_raw(s, layer[m - 1], delta);
    for (std::size_t j = 1; j < m; ++j) {
        const double via_up = up_raw(s, layer[j - 1], delta);
        if (std::abs(via_up - next[j]) > 1e-10 * (std::abs(next[j]) + scale)) return false;
    }
    return true;
}

bool recombines(const TreeSpec& spec, const std::vector<Step>& steps) {
    const double delta = spec.delta();
    const double scale = spec.params.a0();
    // Cheap analytic screen: the affine moves commute iff mu v = sigma a on every step.
    for (const auto& s : steps) {
        const double gap = s.p.mu * s.p.v - s.p.sigma * s.p.a;
        if (std::abs(gap) > 1e-12 * (std::abs(s.p.mu * s.p.v) + std::abs(s.p.sigma * s.p.a) + 1e-300)) return false;
    }
    std::vector<double> layer{scale}, next;
    for (std::size_t k = 0; k < spec.n; ++k) {
        if (!advance_layer(steps[k], layer, next, delta, scale)) return false;
        layer.swap(next);
    }
    return true;
}

double price_lattice(const TreeSpec& spec, const std::vector<Step>& steps, const OptionSpec& option) {
    const std::size_t n = spec.n;
    const double delta = spec.delta();
    const double scale = spec.params.a0();
    // Keep every block-th layer and regenerate the others on the way back:
    // O(n^1.5) memory instead of O(n^2).
    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(n)))));
    std::vector<std::vector<double>> checkpoints;
    std::vector<double> layer{scale}, next;
    for (std::size_t k = 0; k < n; ++k) {
        if (k % block == 0) checkpoints.push_back(layer);
        advance_layer(steps[k], layer, next, delta, scale);
        layer.swap(next);
    }
    std::vector<double> values(layer.size());
    for (std::size_t j = 0; j < layer.size(); ++j) values[j] = option.value(layer[j]);

    std::vector<std::vector<double>> buffer;
    for (std::size_t c = checkpoints.size(); c-- > 0;) {
        const std::size_t k0 = c * block;
        const std::size_t k1 = std::min(k0 + block, n);
        buffer.assign(1, checkpoints[c]);
        for (std::size_t k = k0 + 1; k < k1; ++k) {
            advance_layer(steps[k - 1], buffer.back(), next, delta, scale);
            buffer.push_back(next);
        }
        for (std::size_t k = k1; k-- > k0;) {
            const auto& nodes = buffer[k - k0];
            const Step& s = steps[k];
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                const double q = branch(s, nodes[j], spec.p_n, delta).q;
                values[j] = s.disc * (q * values[j + 1] + (1.0 - q) * values[j]);
            }
            values.resize(nodes.size());
        }
    }
    return values.front();
}

double price_exact(const TreeSpec& spec, const std::vector<Step>& steps, const OptionSpec& option) {
    const double delta = spec.delta();
    std::function<double(std::size_t, double)> value = [&](std::size_t k, double a) -> double {
        if (k == spec.n) return option.value(a);
        const Step& s = steps[k];
        const Branch b = branch(s, a, spec.p_n, delta);
        return s.disc * (b.q * value(k + 1, b.up) + (1.0 - b.q) * value(k + 1, b.down));
    };
    return value(0, spec.params.a0());
}

struct Grid {
    double lo;
    double step;
    std::size_t size;
    double at(std::size_t i) const { return lo + step * static_cast<double>(i); }
};

inline double interpolate(const Grid& g, const std::vector<double>& values, double x) {
    const double pos = (x - g.lo) / g.step;
    const double cell = std::clamp(std::floor(pos), 0.0, static_cast<double>(g.size - 2));
    const auto i = static_cast<std::size_t>(cell);
    const double w = pos - cell;
    return values[i] + w * (values[i + 1] - values[i]);
}

double price_bucketed(const TreeSpec& spec, const std::vector<Step>& steps, const OptionSpec& option) {
    const std::size_t n = spec.n;
    const double delta = spec.delta();
    const double a0 = spec.params.a0();

    // Grid k spans the risk-neutral mean +- 8 sd, clipped to the all-down and
    // all-up paths, which bound every reachable node.
    std::vector<Grid> grids(n);
    grids[0] = {a0, 1.0, 1};
    double mean = a0, var = 0.0, lo_path = a0, hi_path = a0;
    for (std::size_t k = 1; k < n; ++k) {
        const Step& s = steps[k - 1];
        const double growth = 1.0 + s.p.chi(s.beta) * delta / s.beta;
        const double psi = s.p.psi(mean);
        var = growth * growth * var + (psi * psi + s.p.sigma * s.p.sigma * var) * delta;
        mean *= growth;
        lo_path = down_raw(s, lo_path, delta);
        hi_path = up_raw(s, hi_path, delta);
        const double sd = std::sqrt(var);
        const double lo = std::max(mean - 8.0 * sd, lo_path);
        const double hi = std::min(mean + 8.0 * sd, hi_path);
        const std::size_t m = hi > lo ? spec.bucket_points : 2;
        grids[k] = {lo, hi > lo ? (hi - lo) / static_cast<double>(m - 1) : 1.0, m};
    }

    std::vector<double> values, next_values;
    for (std::size_t k = n; k-- > 0;) {
        const Grid& g = grids[k];
        const Step& s = steps[k];
        values.resize(g.size);
        for (std::size_t i = 0; i < g.size; ++i) {
            const Branch b = branch(s, g.at(i), spec.p_n, delta);
            double vu, vd;
            if (k + 1 == n) {
                vu = option.value(b.up);
                vd = option.value(b.down);
            } else {
                vu = interpolate(grids[k + 1], next_values, b.up);
                vd = interpolate(grids[k + 1], next_values, b.down);
            }
            values[i] = s.disc * (b.q * vu + (1.0 - b.q) * vd);
        }
        next_values.swap(values);
    }
    return next_values.front();
}

}  // namespace

std::vector<double> tree_beta(const TreeSpec& spec) {
    spec.validate();
    const auto steps = make_steps(spec);
    std::vector<double> beta;
    beta.reserve(spec.n + 1);
    for (const auto& s : steps) beta.push_back(s.beta);
    const Step& last = steps.back();
    beta.push_back(last.beta + last.p.chi(last.beta) * spec.delta());
    return beta;
}

TreeResult tree_price_detailed(const TreeSpec& spec, const OptionSpec& option) {
    spec.validate();
    option.validate();
    require(std::abs(option.maturity - spec.t_mat) <= 1e-12 * spec.t_mat, ErrorCode::InvalidArgument,
            "option maturity must match the tree maturity");
    require(option.dividend_yield == 0.0, ErrorCode::Unsupported, "trees do not handle dividend yields");
    const auto steps = make_steps(spec);
    if (spec.check_root_arbitrage) {
        market_price_of_risk(steps[0].p, spec.params.a0(), steps[0].beta);
    }

    TreeResult out;
    out.mode = spec.mode;
    if (spec.mode == TreeMode::Auto) {
        if (recombines(spec, steps)) {
            out.mode = TreeMode::Recombining;
        } else {
            out.mode = spec.n <= kMaxExactTreeSteps ? TreeMode::Exact : TreeMode::Bucketed;
        }
    } else if (spec.mode == TreeMode::Recombining) {
        require(recombines(spec, steps), ErrorCode::Unsupported,
                "tree does not recombine for these coefficients (need mu v = sigma a)");
    } else if (spec.mode == TreeMode::Exact) {
        require(spec.n <= kMaxExactTreeSteps, ErrorCode::TreeTooLarge,
                "exact non-recombining tree limited to n <= " + std::to_string(kMaxExactTreeSteps));
    }

    switch (out.mode) {
        case TreeMode::Recombining: out.price = price_lattice(spec, steps, option); break;
        case TreeMode::Exact: out.price = price_exact(spec, steps, option); break;
        default: out.price = price_bucketed(spec, steps, option); break;
    }
    return out;
}

double tree_price(const TreeSpec& spec, const OptionSpec& option) {
    return tree_price_detailed(spec, option).price;
}

std::vector<TreeNode> tree_nodes(const TreeSpec& spec, std::size_t max_nodes) {
    spec.validate();
    const auto steps = make_steps(spec);
    const double delta = spec.delta();
    const std::size_t n = spec.n;
    std::vector<TreeNode> out;

    auto node_at = [&](std::size_t k, std::size_t id, double a) {
        TreeNode node;
        node.k = k;
        node.id = id;
        node.a = a;
        if (k < n) {
            const Step& s = steps[k];
            const auto mv = node_moves(s.p, a, spec.p_n, delta);
            node.u = mv.u;
            node.d = mv.d;
            node.q = risk_neutral_q(s.p, a, s.beta, spec.p_n, delta);
            node.disc = s.disc;
        }
        return node;
    };

    if (spec.mode != TreeMode::Exact && recombines(spec, steps)) {
        require((n + 1) * (n + 2) / 2 <= max_nodes, ErrorCode::TreeTooLarge, "lattice too large to list");
        std::vector<double> layer{spec.params.a0()}, next;
        for (std::size_t k = 0; k <= n; ++k) {
            for (std::size_t j = 0; j < layer.size(); ++j) out.push_back(node_at(k, j, layer[j]));
            if (k < n) {
                advance_layer(steps[k], layer, next, delta, spec.params.a0());
                layer.swap(next);
            }
        }
        return out;
    }
    require(spec.mode != TreeMode::Recombining, ErrorCode::Unsupported,
            "tree does not recombine for these coefficients (need mu v = sigma a)");
    require(n < 40 && (std::size_t{2} << n) - 1 <= max_nodes, ErrorCode::TreeTooLarge,
            "non-recombining tree too large to list");
    // Heap numbering: root 0, children of i are 2i + 1 (down) and 2i + 2 (up).
    std::vector<double> layer{spec.params.a0()};
    std::size_t first_id = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        std::vector<double> next;
        for (std::size_t j = 0; j < layer.size(); ++j) {
            out.push_back(node_at(k, first_id + j, layer[j]));
            if (k < n) {
                next.push_back(layer[j] + out.back().d);
                next.push_back(layer[j] + out.back().u);
            }
        }
        first_id += layer.size();
        layer.swap(next);
    }
    return out;
}

}  // namespace bbsm
