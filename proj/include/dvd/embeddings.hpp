#ifndef DVD_EMBEDDINGS_HPP
#define DVD_EMBEDDINGS_HPP

#include <deque>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dvd/envs.hpp"
#include "dvd/rng.hpp"

namespace dvd {

/// FIFO buffer of (filtered) observations from recent rollouts; the pool
/// anchor states are drawn from.
class StateBuffer {
public:
    explicit StateBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(const Eigen::VectorXd& state);
    std::size_t size() const { return states_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return states_.empty(); }
    const std::deque<Eigen::VectorXd>& states() const { return states_; }

private:
    std::size_t capacity_;
    std::deque<Eigen::VectorXd> states_;
};

enum class AnchorStrategy { Random, MaxVariance, GreedyDpp };

std::string strategy_name(AnchorStrategy s);
AnchorStrategy parse_strategy(const std::string& name);

struct EmbeddingConfig {
    int n_states = 20;
    AnchorStrategy strategy = AnchorStrategy::Random;
    int update_every = 20;

    void validate() const;
};

/// Appends every observation of the trajectory, FIFO-evicting beyond capacity.
void record_states(StateBuffer& buffer, const Trajectory& trajectory);

/// Picks n anchor states from the buffer. Random draws uniformly without
/// replacement; MaxVariance greedily takes the state of largest zero-mean
/// GP posterior variance under an SE kernel; GreedyDpp greedily maximizes
/// the log-determinant of the anchor Gram matrix. Deterministic given
/// buffer order and seed; when the buffer holds fewer than n states, all
/// of them are returned.
std::vector<Eigen::VectorXd> select_anchors(const StateBuffer& buffer, const EmbeddingConfig& cfg,
                                            Rng& rng);

/// True iff anchors are due for re-sampling at this iteration.
bool refresh_due(long long iteration, const EmbeddingConfig& cfg);

} // namespace dvd

#endif
