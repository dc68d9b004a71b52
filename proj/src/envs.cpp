#include "dvd/envs.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dvd/diversity.hpp"

namespace dvd {

// ---------------------------------------------------------------------------
// StateFilter
// ---------------------------------------------------------------------------

StateFilter::StateFilter(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

void StateFilter::observe(const Eigen::VectorXd& obs) {
    if (count_ == 0 && mean_.size() == 0) {
        mean_ = Eigen::VectorXd::Zero(obs.size());
        m2_ = Eigen::VectorXd::Zero(obs.size());
    }
    if (obs.size() != mean_.size())
        throw std::invalid_argument("StateFilter: observation dimension mismatch");
    ++count_;
    const Eigen::VectorXd delta = obs - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(obs - mean_);
}

Eigen::VectorXd StateFilter::variance() const {
    if (count_ == 0) return Eigen::VectorXd::Zero(mean_.size());
    return m2_ / static_cast<double>(count_);
}

Eigen::VectorXd StateFilter::apply(const Eigen::VectorXd& obs) const {
    if (count_ == 0) return obs;
    if (obs.size() != mean_.size())
        throw std::invalid_argument("StateFilter: observation dimension mismatch");
    const Eigen::VectorXd denom = (variance().array() + 1e-8).sqrt();
    return (obs - mean_).cwiseQuotient(denom);
}

// ---------------------------------------------------------------------------
// Tabular MDP
// ---------------------------------------------------------------------------

namespace {

int action_index(int action) {
    switch (action) {
    case -1: return 0;
    case 0: return 1;
    case 1: return 2;
    }
    throw std::invalid_argument("tabular action must be -1, 0 or 1");
}

} // namespace

TabularStep tabular_transition(int state, int action) {
    const int a = action_index(action);
    TabularStep step;
    if (state == 0) {
        step.next_state = a + 1; // left -> s1, down -> s2, right -> s3
        return step;
    }
    if (state >= 1 && state <= 3) {
        // Second layer: s_i maps actions onto shared terminals T_i..T_{i+2}.
        step.terminal = true;
        step.terminal_id = (state - 1) + a;
        step.reward = tabular_terminal_reward(step.terminal_id);
        return step;
    }
    throw std::invalid_argument("tabular_transition: bad state");
}

double tabular_terminal_reward(int terminal_id) {
    if (terminal_id < 0 || terminal_id >= kTabularTerminals)
        throw std::invalid_argument("tabular_terminal_reward: bad terminal");
    // T1, T3, T5 pay +1; T2, T4 pay 0.
    return (terminal_id % 2 == 0) ? 1.0 : 0.0;
}

int tabular_policy_action(const Eigen::VectorXd& logits, int state) {
    if (logits.size() != kTabularDecisionStates * kTabularActions)
        throw std::invalid_argument("tabular policy needs 12 logits");
    const int base = state * kTabularActions;
    int best = 0;
    for (int a = 1; a < kTabularActions; ++a)
        if (logits[base + a] > logits[base + best]) best = a;
    return best - 1; // index 0,1,2 -> action -1,0,1
}

std::vector<Eigen::VectorXd> tabular_optimal_embeddings() {
    const std::vector<std::pair<int, int>> pairs = {{-1, -1}, {-1, 1}, {0, 0}, {1, -1}, {1, 1}};
    std::vector<Eigen::VectorXd> out;
    for (const auto& [a0, a1] : pairs) {
        Eigen::VectorXd e(2);
        e << a0, a1;
        out.push_back(e);
    }
    return out;
}

TabularOracleReport enumerate_tabular(const KernelSpec& kernel) {
    TabularOracleReport report;
    std::vector<Eigen::VectorXd> positive;
    for (int a0 : {-1, 0, 1}) {
        const TabularStep first = tabular_transition(0, a0);
        for (int a1 : {-1, 0, 1}) {
            const TabularStep second = tabular_transition(first.next_state, a1);
            Eigen::VectorXd e(2);
            e << a0, a1;
            report.embeddings.push_back(e);
            report.rewards.push_back(second.reward);
            if (second.reward > 0.0) positive.push_back(e);
        }
    }
    report.positive_count = static_cast<int>(positive.size());

    // Every 5-multiset drawn from the positive-reward embeddings; only the
    // all-distinct one may have a nonzero determinant.
    const int n = report.positive_count;
    bool only_distinct = true;
    std::vector<int> counts(n, 0);
    auto visit = [&](auto&& self, int slot, int first) -> void {
        if (slot == 5) {
            std::vector<Eigen::VectorXd> pop;
            bool distinct = true;
            for (int i = 0; i < n; ++i) {
                if (counts[i] > 1) distinct = false;
                for (int c = 0; c < counts[i]; ++c) pop.push_back(positive[i]);
            }
            const double d = population_diversity(pop, kernel);
            if (distinct)
                report.det_optimal = d;
            else if (d > 1e-9)
                only_distinct = false;
            return;
        }
        for (int i = first; i < n; ++i) {
            ++counts[i];
            self(self, slot + 1, i);
            --counts[i];
        }
    };
    if (n == 5) visit(visit, 0, 0);
    report.only_optimal_has_positive_det = (n == 5) && only_distinct && report.det_optimal > 0.0;

    const auto optimal = tabular_optimal_embeddings();
    report.d_optimal = mean_pairwise_distance(optimal);
    auto duplicate = optimal;
    // Replace the central [0,0] policy with a second copy of [1,1].
    for (auto& e : duplicate)
        if (e[0] == 0.0 && e[1] == 0.0) e = optimal.back();
    report.d_duplicate = mean_pairwise_distance(duplicate);
    report.distance_prefers_duplicate = report.d_duplicate > report.d_optimal;
    return report;
}

Eigen::VectorXd TabularTask::init_params(Rng& rng) const {
    return 0.05 * rng.normal_vector(param_dim());
}

Trajectory TabularTask::rollout(const Eigen::VectorXd& params, const StateFilter&) const {
    Trajectory traj;
    int state = 0;
    for (int t = 0; t < horizon(); ++t) {
        Eigen::VectorXd obs(1);
        obs << static_cast<double>(state);
        const int action = tabular_policy_action(params, state);
        Eigen::VectorXd act(1);
        act << static_cast<double>(action);
        traj.observations.push_back(obs);
        traj.raw_observations.push_back(obs);
        traj.actions.push_back(act);
        const TabularStep step = tabular_transition(state, action);
        traj.total_reward += step.reward;
        if (step.terminal) break;
        state = step.next_state;
    }
    return traj;
}

Eigen::VectorXd TabularTask::embed(const Eigen::VectorXd& params,
                                   const std::vector<Eigen::VectorXd>&) const {
    // Embedding is the two-action trajectory, matching the enumeration oracle.
    const int a0 = tabular_policy_action(params, 0);
    const TabularStep first = tabular_transition(0, a0);
    const int a1 = tabular_policy_action(params, first.next_state);
    Eigen::VectorXd e(2);
    e << a0, a1;
    return e;
}

// ---------------------------------------------------------------------------
// Point environments
// ---------------------------------------------------------------------------

std::pair<Eigen::Vector2d, double> point_step(const PointWallConfig& cfg,
                                              const Eigen::Vector2d& position,
                                              const Eigen::Vector2d& action) {
    if (!position.allFinite() || !action.allFinite())
        throw std::runtime_error("point_step: non-finite position or action");
    const Eigen::Vector2d disp = action * cfg.max_step;
    Eigen::Vector2d next = position + disp;

    // Segment-segment intersection of the motion with the wall.
    const Eigen::Vector2d w = cfg.wall_b - cfg.wall_a;
    const double denom = disp.x() * w.y() - disp.y() * w.x();
    if (std::abs(denom) > 1e-15) {
        const Eigen::Vector2d rel = cfg.wall_a - position;
        const double t = (rel.x() * w.y() - rel.y() * w.x()) / denom;
        const double s = (rel.x() * disp.y() - rel.y() * disp.x()) / denom;
        if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0) {
            const double len = disp.norm();
            const double back = len > 0.0 ? 1e-6 / len : 0.0;
            next = position + std::max(t - back, 0.0) * disp;
        }
    }
    return {next, -(next - cfg.goal).norm()};
}

double straight_line_reward(const PointWallConfig& cfg) {
    Eigen::Vector2d pos = cfg.start;
    double total = 0.0;
    for (int t = 0; t < cfg.horizon; ++t) {
        Eigen::Vector2d to_goal = cfg.goal - pos;
        const double dist = to_goal.norm();
        Eigen::Vector2d action = Eigen::Vector2d::Zero();
        if (dist > 1e-12) action = to_goal.normalized() * std::min(1.0, dist / cfg.max_step);
        auto [next, r] = point_step(cfg, pos, action);
        pos = next;
        total += r;
    }
    return total;
}

double go_around_reward(const PointWallConfig& cfg) {
    // Waypoints skirting the right wall endpoint with a half-unit clearance.
    const double wx = std::max(cfg.wall_a.x(), cfg.wall_b.x()) + 0.5;
    const double wy = std::max(cfg.wall_a.y(), cfg.wall_b.y());
    const std::vector<Eigen::Vector2d> waypoints = {
        {wx, wy - 0.1}, {wx, wy + 0.5}, cfg.goal};
    Eigen::Vector2d pos = cfg.start;
    std::size_t wp = 0;
    double total = 0.0;
    for (int t = 0; t < cfg.horizon; ++t) {
        while (wp + 1 < waypoints.size() && (waypoints[wp] - pos).norm() < cfg.max_step) ++wp;
        const Eigen::Vector2d to_wp = waypoints[wp] - pos;
        const double dist = to_wp.norm();
        Eigen::Vector2d action = Eigen::Vector2d::Zero();
        if (dist > 1e-12) action = to_wp.normalized() * std::min(1.0, dist / cfg.max_step);
        auto [next, r] = point_step(cfg, pos, action);
        pos = next;
        total += r;
    }
    return total;
}

namespace {

Trajectory mlp_point_rollout(const MlpSpec& mlp, const Eigen::VectorXd& params,
                             const StateFilter& filter, const Eigen::Vector2d& start, int horizon,
                             const std::function<std::pair<Eigen::Vector2d, double>(
                                 const Eigen::Vector2d&, const Eigen::Vector2d&, int)>& step) {
    Trajectory traj;
    Eigen::Vector2d pos = start;
    for (int t = 0; t < horizon; ++t) {
        const Eigen::VectorXd raw = pos;
        const Eigen::VectorXd obs = filter.apply(raw);
        const Eigen::VectorXd act = forward(params, mlp, obs);
        if (!act.allFinite())
            throw std::runtime_error("rollout: non-finite action at step " + std::to_string(t));
        traj.raw_observations.push_back(raw);
        traj.observations.push_back(obs);
        traj.actions.push_back(act);
        auto [next, r] = step(pos, Eigen::Vector2d(act[0], act[1]), t);
        pos = next;
        traj.total_reward += r;
    }
    return traj;
}

Eigen::VectorXd mlp_embed(const MlpSpec& mlp, const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& anchors) {
    if (anchors.empty()) throw std::invalid_argument("embed: no anchor states");
    Eigen::VectorXd e(static_cast<Eigen::Index>(anchors.size()) * mlp.act_dim);
    Eigen::Index off = 0;
    for (const auto& s : anchors) {
        e.segment(off, mlp.act_dim) = forward(params, mlp, s);
        off += mlp.act_dim;
    }
    return e;
}

} // namespace

PointTask::PointTask(PointWallConfig cfg, int hidden) : cfg_(cfg) {
    mlp_ = MlpSpec{2, 2, hidden};
}

Eigen::VectorXd PointTask::init_params(Rng& rng) const { return dvd::init_params(mlp_, rng); }

Trajectory PointTask::rollout(const Eigen::VectorXd& params, const StateFilter& filter) const {
    return mlp_point_rollout(mlp_, params, filter, cfg_.start, cfg_.horizon,
                             [this](const Eigen::Vector2d& pos, const Eigen::Vector2d& act, int) {
                                 return point_step(cfg_, pos, act);
                             });
}

Eigen::VectorXd PointTask::embed(const Eigen::VectorXd& params,
                                 const std::vector<Eigen::VectorXd>& anchors) const {
    return mlp_embed(mlp_, params, anchors);
}

MultiModalPointTask::MultiModalPointTask(MultiModalPointConfig cfg, int hidden) : cfg_(cfg) {
    mlp_ = MlpSpec{2, 2, hidden};
}

Eigen::VectorXd MultiModalPointTask::init_params(Rng& rng) const {
    return dvd::init_params(mlp_, rng);
}

Trajectory MultiModalPointTask::rollout(const Eigen::VectorXd& params,
                                        const StateFilter& filter) const {
    const double x0 = cfg_.start.x();
    const int h = cfg_.horizon;
    return mlp_point_rollout(mlp_, params, filter, cfg_.start, h,
                             [this, x0, h](const Eigen::Vector2d& pos, const Eigen::Vector2d& act,
                                           int t) -> std::pair<Eigen::Vector2d, double> {
                                 const Eigen::Vector2d next = pos + act * cfg_.max_step;
                                 // Reward is the magnitude of the final x-displacement,
                                 // paid on the last step; Forward and Backward modes tie.
                                 const double r =
                                     (t == h - 1) ? std::abs(next.x() - x0) : 0.0;
                                 return {next, r};
                             });
}

Eigen::VectorXd MultiModalPointTask::embed(const Eigen::VectorXd& params,
                                           const std::vector<Eigen::VectorXd>& anchors) const {
    return mlp_embed(mlp_, params, anchors);
}

double MultiModalPointTask::final_x_displacement(const Eigen::VectorXd& params,
                                                 const StateFilter& filter) const {
    Eigen::Vector2d pos = cfg_.start;
    for (int t = 0; t < cfg_.horizon; ++t) {
        const Eigen::VectorXd act = forward(params, mlp_, filter.apply(pos));
        pos += Eigen::Vector2d(act[0], act[1]) * cfg_.max_step;
    }
    return pos.x() - cfg_.start.x();
}

} // namespace dvd
