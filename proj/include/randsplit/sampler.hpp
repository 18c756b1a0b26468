#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "randsplit/decomposition.hpp"
#include "randsplit/grid.hpp"

namespace randsplit {

enum class StrategyKind { UniformSingle, UniformK, Predictor };

StrategyKind parse_strategy_kind(const std::string& name);
std::string to_string(StrategyKind kind);

struct StrategySpec {
    StrategyKind kind = StrategyKind::UniformSingle;
    int k = 1;
    double rho = 0.01;
    double threshold = 1e-3;
    int coarse_factor = 2;

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
    /// k for the uniform kinds, rho for the predictor.
    double parameter() const;
};

/// A sampled batch: sorted distinct subdomain indices with their 1/tau_l.
struct BatchDraw {
    std::vector<int> batch;
    std::vector<double> inv_tau;

    bool empty() const { return batch.empty(); }
    bool operator==(const BatchDraw&) const = default;
};

/// Random stream keyed by (seed, realization, step). The same key always
/// reproduces the same sequence, independent of evaluation order.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t realization, std::uint64_t step);

    /// Uniform integer in [0, n).
    int uniform_index(int n);
    /// Uniform double in [0, 1).
    double uniform01();

private:
    std::mt19937_64 engine_;
};

/// Activity data for the predictor strategy at one step.
struct StepContext {
    std::vector<int> active;
};

/// Draws the batch for one step. The predictor kind requires `ctx`.
/// A predictor draw may return an empty batch (complement of a full active set).
BatchDraw draw_batch(const StrategySpec& strategy, int s, RngStream& rng, const StepContext* ctx = nullptr);

/// The batch law of a strategy as an explicit list of (probability, batch)
/// outcomes. Used for exact unbiasedness certificates; uniform_k enumerates
/// all s^k ordered draws and merges duplicates.
struct BatchOutcome {
    double probability;
    BatchDraw draw;
};
std::vector<BatchOutcome> enumerate_batch_law(const StrategySpec& strategy, int s, const StepContext* ctx = nullptr);

/// Inclusion probabilities of the strategy for the given step context.
BatchWeights batch_weights(const StrategySpec& strategy, int s, const StepContext* ctx = nullptr);

/// Nodewise 1 where |z_prev| + |z_cur| + |f| > threshold, else 0.
GridFunction activity_indicator(const GridFunction& z_prev, const GridFunction& z_cur, const GridFunction& f,
                                double threshold);

/// Subdomains with h_norm(psi * chi_l) >= rho * h_norm(psi), chi_l evaluated at
/// the nodes of psi's grid.
std::vector<int> active_set(const GridFunction& psi, const Decomposition& dec, double rho);
/// Same test with chi_l already sampled at psi's nodes.
std::vector<int> active_set(const GridFunction& psi, const std::vector<std::vector<double>>& node_chi, double rho);

}  // namespace randsplit
