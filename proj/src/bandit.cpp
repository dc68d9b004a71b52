#include "dvd/bandit.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace dvd {

BanditState::BanditState(std::vector<double> lambda_values, std::uint64_t seed) : rng_(seed) {
    if (lambda_values.empty()) throw std::invalid_argument("BanditState: need at least one arm");
    std::set<double> distinct(lambda_values.begin(), lambda_values.end());
    if (distinct.size() != lambda_values.size())
        throw std::invalid_argument("BanditState: lambda values must be distinct");
    for (double lv : lambda_values) {
        if (!(lv >= 0.0 && lv < 1.0))
            throw std::invalid_argument("BanditState: lambda must be in [0, 1)");
        arms_.push_back(BetaArm{lv, 1.0, 1.0});
    }
}

std::pair<std::size_t, double> BanditState::sample_lambda() {
    std::size_t best = 0;
    double best_mu = -1.0;
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        const double mu = rng_.beta(arms_[i].alpha, arms_[i].beta);
        if (mu > best_mu) {
            best_mu = mu;
            best = i;
        }
    }
    last_chosen_ = best;
    return {best, arms_[best].lambda_value};
}

void BanditState::update(std::size_t arm, int r) {
    if (!last_chosen_ || *last_chosen_ != arm)
        throw std::logic_error("BanditState::update: arm was not the last chosen");
    if (r != 0 && r != 1) throw std::invalid_argument("BanditState::update: r must be 0 or 1");
    arms_[arm].alpha += r;
    arms_[arm].beta += 1 - r;
}

int reward_signal(double prev_reward, double new_reward) {
    if (!std::isfinite(prev_reward) || !std::isfinite(new_reward))
        throw std::invalid_argument("reward_signal: non-finite reward");
    return new_reward > prev_reward ? 1 : 0;
}

} // namespace dvd
