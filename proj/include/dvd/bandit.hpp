#ifndef DVD_BANDIT_HPP
#define DVD_BANDIT_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "dvd/rng.hpp"

namespace dvd {

struct BetaArm {
    double lambda_value = 0.0;
    double alpha = 1.0; // 1 + successes
    double beta = 1.0;  // 1 + failures
};

/// Thompson sampling over the reward/diversity trade-off arms, with
/// Beta-Bernoulli posteriors and a stationarity assumption.
class BanditState {
public:
    BanditState(std::vector<double> lambda_values, std::uint64_t seed);

    /// Draws a mean from each arm's posterior and returns the argmax
    /// (ties to the lowest index). Records the choice.
    std::pair<std::size_t, double> sample_lambda();

    /// Chosen arm: (alpha, beta) += (r, 1-r). Other arms untouched.
    void update(std::size_t arm, int r);

    const std::vector<BetaArm>& arms() const { return arms_; }
    std::optional<std::size_t> last_chosen() const { return last_chosen_; }

private:
    std::vector<BetaArm> arms_;
    std::optional<std::size_t> last_chosen_;
    Rng rng_;
};

/// 1 iff the new reward strictly improves on the previous one.
int reward_signal(double prev_reward, double new_reward);

} // namespace dvd

#endif
