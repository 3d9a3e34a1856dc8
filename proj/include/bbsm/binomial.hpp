#pragma once

#include <cstddef>
#include <vector>

#include "bbsm/model.hpp"
#include "bbsm/pricing.hpp"

namespace bbsm {

enum class TreeMode {
    Auto,         // lattice if it recombines, else exact for small n, else bucketed
    Recombining,  // fails with Unsupported unless the moves recombine
    Exact,        // full non-recombining tree, n <= kMaxExactTreeSteps
    Bucketed,     // per-step price grid with linear interpolation
};

inline constexpr std::size_t kMaxExactTreeSteps = 24;

struct TreeSpec {
    ParamSchedule params;
    std::size_t n = 100;
    double t_mat = 1.0;
    double p_n = 0.5;
    TreeMode mode = TreeMode::Auto;
    std::size_t bucket_points = 2049;
    // Require phi > chi at the root state. Calibration turns this off and
    // penalises the constraint itself.
    bool check_root_arbitrage = true;

    double delta() const noexcept { return t_mat / static_cast<double>(n); }
    void validate() const;
};

struct Moves {
    double u;
    double d;
};

/// Additive up/down price changes matching mean phi Delta and variance psi^2 Delta.
Moves node_moves(const ModelParams& params, double a_k, double p_n, double delta);

/// q = p - ((phi - chi A / beta) / psi) sqrt(p (1 - p) Delta); throws QOutOfRange
/// unless 0 < q < 1.
double risk_neutral_q(const ModelParams& params, double a_k, double beta_k, double p_n, double delta);

/// The same probability from the replication ratio (A chi Delta / beta - d) / (u - d),
/// unchecked.
double risk_neutral_q_ratio(const ModelParams& params, double a_k, double beta_k, double p_n, double delta);

struct TreeNode {
    std::size_t k = 0;
    std::size_t id = 0;  // up-move count on a lattice, heap index otherwise
    double a = 0.0;
    double u = 0.0;
    double d = 0.0;
    double q = 0.0;
    double disc = 0.0;  // 1 / D_Delta
};

struct TreeResult {
    double price = 0.0;
    TreeMode mode = TreeMode::Auto;  // mode actually used
};

TreeResult tree_price_detailed(const TreeSpec& spec, const OptionSpec& option);
double tree_price(const TreeSpec& spec, const OptionSpec& option);

/// Every node of a small tree, as a lattice when it recombines. The terminal
/// layer carries only the price.
std::vector<TreeNode> tree_nodes(const TreeSpec& spec, std::size_t max_nodes = 1u << 20);

/// Deterministic riskless values beta_k on the tree.
std::vector<double> tree_beta(const TreeSpec& spec);

/// Exact MB discount 1 + rho Delta / (beta_0 + rho k Delta).
double mb_discount(double beta0, double rho, std::size_t k, double delta);
/// Small-time approximation 1 + rho Delta / beta_0.
double mb_discount_approx(double beta0, double rho, double delta);

}  // namespace bbsm
