#include "randsplit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace randsplit {

StrategyKind parse_strategy_kind(const std::string& name) {
    if (name == "uniform_single") return StrategyKind::UniformSingle;
    if (name == "uniform_k") return StrategyKind::UniformK;
    if (name == "predictor") return StrategyKind::Predictor;
    throw std::invalid_argument("unknown strategy kind '" + name + "'");
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::UniformSingle: return "uniform_single";
        case StrategyKind::UniformK: return "uniform_k";
        case StrategyKind::Predictor: return "predictor";
    }
    return "unknown";
}

void StrategySpec::validate() const {
    if (k < 1) throw std::invalid_argument("strategy: k must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("strategy: rho must lie in (0, 1)");
    if (!(threshold > 0.0)) throw std::invalid_argument("strategy: threshold must be positive");
    if (coarse_factor < 1) throw std::invalid_argument("strategy: coarse_factor must be >= 1");
}

double StrategySpec::parameter() const {
    switch (kind) {
        case StrategyKind::UniformSingle: return 1.0;
        case StrategyKind::UniformK: return k;
        case StrategyKind::Predictor: return rho;
    }
    return 0.0;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t realization, std::uint64_t step) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32),
                      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
    engine_.seed(seq);
}

int RngStream::uniform_index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

double RngStream::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

namespace {

std::vector<int> complement(const std::vector<int>& set, int s) {
    std::vector<bool> in(s, false);
    for (int l : set) in[l] = true;
    std::vector<int> out;
    for (int l = 0; l < s; ++l)
        if (!in[l]) out.push_back(l);
    return out;
}

BatchDraw make_draw(std::vector<int> members, const BatchWeights& w) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    BatchDraw d;
    d.batch = std::move(members);
    for (int l : d.batch) d.inv_tau.push_back(1.0 / w.tau[l]);
    return d;
}

const StepContext& require_context(const StepContext* ctx) {
    if (!ctx) throw std::invalid_argument("predictor strategy needs the step's active set");
    return *ctx;
}

}  // namespace

BatchWeights batch_weights(const StrategySpec& strategy, int s, const StepContext* ctx) {
    switch (strategy.kind) {
        case StrategyKind::UniformSingle: return tau_uniform_single(s);
        case StrategyKind::UniformK: return tau_uniform_k(s, strategy.k);
        case StrategyKind::Predictor: return tau_predictor(s, require_context(ctx).active, strategy.rho);
    }
    throw std::logic_error("unhandled strategy kind");
}

BatchDraw draw_batch(const StrategySpec& strategy, int s, RngStream& rng, const StepContext* ctx) {
    const BatchWeights w = batch_weights(strategy, s, ctx);
    switch (strategy.kind) {
        case StrategyKind::UniformSingle: return make_draw({rng.uniform_index(s)}, w);
        case StrategyKind::UniformK: {
            std::vector<int> members(strategy.k);
            for (int& l : members) l = rng.uniform_index(s);
            return make_draw(std::move(members), w);
        }
        case StrategyKind::Predictor: {
            const std::vector<int>& active = ctx->active;
            if (rng.uniform01() < strategy.rho) return make_draw(complement(active, s), w);
            return make_draw(active, w);
        }
    }
    throw std::logic_error("unhandled strategy kind");
}

std::vector<BatchOutcome> enumerate_batch_law(const StrategySpec& strategy, int s, const StepContext* ctx) {
    const BatchWeights w = batch_weights(strategy, s, ctx);
    std::vector<BatchOutcome> out;
    switch (strategy.kind) {
        case StrategyKind::UniformSingle:
            for (int l = 0; l < s; ++l) out.push_back({1.0 / s, make_draw({l}, w)});
            break;
        case StrategyKind::UniformK: {
            const double total = std::pow(static_cast<double>(s), strategy.k);
            if (total > 1e6) throw std::invalid_argument("uniform_k law too large to enumerate");
            std::map<std::vector<int>, double> merged;
            std::vector<int> digits(strategy.k, 0);
            for (long n = 0; n < static_cast<long>(total); ++n) {
                long rest = n;
                for (int& d : digits) {
                    d = static_cast<int>(rest % s);
                    rest /= s;
                }
                merged[make_draw(digits, w).batch] += 1.0 / total;
            }
            for (auto& [batch, prob] : merged) out.push_back({prob, make_draw(batch, w)});
            break;
        }
        case StrategyKind::Predictor: {
            const std::vector<int>& active = require_context(ctx).active;
            out.push_back({1.0 - strategy.rho, make_draw(active, w)});
            out.push_back({strategy.rho, make_draw(complement(active, s), w)});
            break;
        }
    }
    return out;
}

GridFunction activity_indicator(const GridFunction& z_prev, const GridFunction& z_cur, const GridFunction& f,
                                double threshold) {
    if (z_prev.size() != z_cur.size() || z_cur.size() != f.size())
        throw std::invalid_argument("activity_indicator: grid mismatch");
    GridFunction psi(z_cur.grid(), false);
    for (std::size_t k = 0; k < psi.size(); ++k)
        psi[k] = (std::abs(z_prev[k]) + std::abs(z_cur[k]) + std::abs(f[k]) > threshold) ? 1.0 : 0.0;
    return psi;
}

std::vector<int> active_set(const GridFunction& psi, const std::vector<std::vector<double>>& node_chi, double rho) {
    const double bound = rho * h_norm(psi);
    std::vector<int> active;
    GridFunction weighted(psi.grid(), false);
    for (std::size_t l = 0; l < node_chi.size(); ++l) {
        for (std::size_t k = 0; k < psi.size(); ++k) weighted[k] = psi[k] * node_chi[l][k];
        if (h_norm(weighted) >= bound) active.push_back(static_cast<int>(l));
    }
    return active;
}

std::vector<int> active_set(const GridFunction& psi, const Decomposition& dec, double rho) {
    return active_set(psi, node_partition_of_unity(dec, psi.grid()), rho);
}

}  // namespace randsplit
