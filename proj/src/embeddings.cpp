#include "dvd/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dvd {

void StateBuffer::push(const Eigen::VectorXd& state) {
    if (!states_.empty() && state.size() != states_.front().size())
        throw std::invalid_argument("StateBuffer: dimension mismatch");
    states_.push_back(state);
    while (states_.size() > capacity_) states_.pop_front();
}

std::string strategy_name(AnchorStrategy s) {
    switch (s) {
    case AnchorStrategy::Random: return "random";
    case AnchorStrategy::MaxVariance: return "maxvar";
    case AnchorStrategy::GreedyDpp: return "dpp";
    }
    throw std::logic_error("strategy_name: bad strategy");
}

AnchorStrategy parse_strategy(const std::string& name) {
    if (name == "random") return AnchorStrategy::Random;
    if (name == "maxvar") return AnchorStrategy::MaxVariance;
    if (name == "dpp") return AnchorStrategy::GreedyDpp;
    throw std::invalid_argument("unknown strategy '" + name + "' (valid: random, maxvar, dpp)");
}

void EmbeddingConfig::validate() const {
    if (n_states < 1) throw std::invalid_argument("n_states must be >= 1");
    if (update_every < 1) throw std::invalid_argument("update_every must be >= 1");
}

void record_states(StateBuffer& buffer, const Trajectory& trajectory) {
    for (const auto& obs : trajectory.observations) buffer.push(obs);
}

namespace {

double state_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::exp(-0.5 * (a - b).squaredNorm());
}

// Greedy selection by GP posterior variance under a zero-mean SE prior.
// The log-det gain of adding a state equals the log of this variance
// (Schur complement), so the k-DPP surrogate shares the same loop.
std::vector<std::size_t> greedy_variance_indices(const std::deque<Eigen::VectorXd>& states,
                                                 std::size_t n) {
    const std::size_t total = states.size();
    std::vector<double> variance(total, 1.0);
    std::vector<std::vector<double>> coeffs(total);
    std::vector<bool> taken(total, false);
    std::vector<std::size_t> picked;
    while (picked.size() < n) {
        std::size_t best = total;
        for (std::size_t j = 0; j < total; ++j)
            if (!taken[j] && (best == total || variance[j] > variance[best])) best = j;
        taken[best] = true;
        picked.push_back(best);
        const double pivot = std::sqrt(std::max(variance[best], 1e-12));
        for (std::size_t j = 0; j < total; ++j) {
            if (taken[j]) continue;
            double cross = state_kernel(states[best], states[j]);
            for (std::size_t t = 0; t < coeffs[best].size(); ++t)
                cross -= coeffs[best][t] * coeffs[j][t];
            const double e = cross / pivot;
            coeffs[j].push_back(e);
            variance[j] = std::max(variance[j] - e * e, 0.0);
        }
    }
    return picked;
}

} // namespace

std::vector<Eigen::VectorXd> select_anchors(const StateBuffer& buffer, const EmbeddingConfig& cfg,
                                            Rng& rng) {
    cfg.validate();
    if (buffer.empty()) throw std::invalid_argument("select_anchors: empty buffer");
    const auto& states = buffer.states();
    const std::size_t n = std::min<std::size_t>(cfg.n_states, states.size());

    std::vector<std::size_t> indices;
    if (cfg.strategy == AnchorStrategy::Random) {
        std::vector<std::size_t> pool(states.size());
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.integer(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        indices = greedy_variance_indices(states, n);
    }

    std::vector<Eigen::VectorXd> anchors;
    anchors.reserve(indices.size());
    for (std::size_t idx : indices) anchors.push_back(states[idx]);
    return anchors;
}

bool refresh_due(long long iteration, const EmbeddingConfig& cfg) {
    cfg.validate();
    if (iteration < 0) throw std::invalid_argument("refresh_due: negative iteration");
    return iteration % cfg.update_every == 0;
}

} // namespace dvd
