#ifndef DVD_ENVS_HPP
#define DVD_ENVS_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dvd/kernels.hpp"
#include "dvd/policy.hpp"
#include "dvd/rng.hpp"

namespace dvd {

struct Trajectory {
    std::vector<Eigen::VectorXd> observations;     // as seen by the policy (filtered)
    std::vector<Eigen::VectorXd> raw_observations; // pre-filter, for filter updates
    std::vector<Eigen::VectorXd> actions;
    double total_reward = 0.0;
};

/// Welford running mean/variance over observations; output is
/// (obs - mean) / sqrt(var + 1e-8). Identity until the first observation.
class StateFilter {
public:
    StateFilter() = default;
    explicit StateFilter(int dim);

    void observe(const Eigen::VectorXd& obs);
    Eigen::VectorXd apply(const Eigen::VectorXd& obs) const;

    long long count() const { return count_; }
    Eigen::VectorXd mean() const { return mean_; }
    Eigen::VectorXd variance() const;
    int dim() const { return static_cast<int>(mean_.size()); }

private:
    long long count_ = 0;
    Eigen::VectorXd mean_;
    Eigen::VectorXd m2_;
};

// ---------------------------------------------------------------------------
// Tabular MDP: four decision states in two layers feeding five shared
// terminals, three of which pay +1. Policies are direct logit tables.
// ---------------------------------------------------------------------------

inline constexpr int kTabularDecisionStates = 4;
inline constexpr int kTabularActions = 3; // -1 (left), 0 (down), 1 (right)
inline constexpr int kTabularTerminals = 5;
inline constexpr double kTabularGapDelta = 1.0;

struct TabularStep {
    bool terminal = false;
    int next_state = 0;   // decision state index when !terminal
    int terminal_id = -1; // 0..4 for T1..T5 when terminal
    double reward = 0.0;
};

/// action is -1, 0 or 1.
TabularStep tabular_transition(int state, int action);

double tabular_terminal_reward(int terminal_id);

/// Greedy action of a 4x3 logit table at a decision state; ties break to
/// the lowest action index (left before down before right).
int tabular_policy_action(const Eigen::VectorXd& logits, int state);

/// The five optimal two-action embeddings of the layout.
std::vector<Eigen::VectorXd> tabular_optimal_embeddings();

struct TabularOracleReport {
    std::vector<Eigen::VectorXd> embeddings; // all 9 two-action trajectories
    std::vector<double> rewards;
    int positive_count = 0;
    double det_optimal = 0.0;           // det over the optimal set
    bool only_optimal_has_positive_det = false;
    double d_optimal = 0.0;             // mean pairwise distance of the optimal set
    double d_duplicate = 0.0;           // same with [0,0] replaced by a second [1,1]
    bool distance_prefers_duplicate = false;
};

/// Enumerates every two-action policy trajectory and checks, over all
/// 5-multisets of positive-reward embeddings, that only the distinct
/// optimal set has det > 0, and that mean pairwise distance prefers a
/// degenerate set with a duplicated corner.
TabularOracleReport enumerate_tabular(const KernelSpec& kernel);

// ---------------------------------------------------------------------------
// Point environments
// ---------------------------------------------------------------------------

struct PointWallConfig {
    Eigen::Vector2d start{0.0, 0.0};
    Eigen::Vector2d goal{0.0, 6.0};
    Eigen::Vector2d wall_a{-3.0, 3.0};
    Eigen::Vector2d wall_b{3.0, 3.0};
    double max_step = 0.25;
    int horizon = 50;
};

/// One step of the wall environment: displacement = action * max_step,
/// truncated 1e-6 before the wall when the motion segment crosses it.
/// Reward is the negative distance from the new position to the goal.
std::pair<Eigen::Vector2d, double> point_step(const PointWallConfig& cfg,
                                              const Eigen::Vector2d& position,
                                              const Eigen::Vector2d& action);

/// Total reward of the greedy head-straight-to-goal behavior (the
/// deceptive plateau) under the given geometry.
double straight_line_reward(const PointWallConfig& cfg);

/// Total reward of a scripted waypoint route around the wall's right end.
/// Strictly better than the plateau; used as the success reference.
double go_around_reward(const PointWallConfig& cfg);

struct MultiModalPointConfig {
    Eigen::Vector2d start{0.0, 0.0};
    double max_step = 0.25;
    int horizon = 50;
};

// ---------------------------------------------------------------------------
// Task: an environment bound to its policy representation, the unit the
// optimizers evaluate. Rollouts are pure given a filter snapshot.
// ---------------------------------------------------------------------------

class Task {
public:
    virtual ~Task() = default;
    virtual std::string name() const = 0;
    virtual int param_dim() const = 0;
    virtual int obs_dim() const = 0;
    virtual int horizon() const = 0;
    /// Whether embeddings come from anchor states (false for tabular,
    /// whose embedding is the rollout action pair).
    virtual bool uses_anchors() const = 0;
    virtual Eigen::VectorXd init_params(Rng& rng) const = 0;
    virtual Trajectory rollout(const Eigen::VectorXd& params, const StateFilter& filter) const = 0;
    virtual Eigen::VectorXd embed(const Eigen::VectorXd& params,
                                  const std::vector<Eigen::VectorXd>& anchors) const = 0;
};

class TabularTask final : public Task {
public:
    std::string name() const override { return "tabular"; }
    int param_dim() const override { return kTabularDecisionStates * kTabularActions; }
    int obs_dim() const override { return 1; }
    int horizon() const override { return 2; }
    bool uses_anchors() const override { return false; }
    Eigen::VectorXd init_params(Rng& rng) const override;
    Trajectory rollout(const Eigen::VectorXd& params, const StateFilter& filter) const override;
    Eigen::VectorXd embed(const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& anchors) const override;
};

class PointTask final : public Task {
public:
    explicit PointTask(PointWallConfig cfg = {}, int hidden = 16);
    std::string name() const override { return "point"; }
    int param_dim() const override { return mlp_.param_count(); }
    int obs_dim() const override { return 2; }
    int horizon() const override { return cfg_.horizon; }
    bool uses_anchors() const override { return true; }
    Eigen::VectorXd init_params(Rng& rng) const override;
    Trajectory rollout(const Eigen::VectorXd& params, const StateFilter& filter) const override;
    Eigen::VectorXd embed(const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& anchors) const override;
    const PointWallConfig& config() const { return cfg_; }
    const MlpSpec& mlp() const { return mlp_; }

private:
    PointWallConfig cfg_;
    MlpSpec mlp_;
};

class MultiModalPointTask final : public Task {
public:
    explicit MultiModalPointTask(MultiModalPointConfig cfg = {}, int hidden = 16);
    std::string name() const override { return "multimodal"; }
    int param_dim() const override { return mlp_.param_count(); }
    int obs_dim() const override { return 2; }
    int horizon() const override { return cfg_.horizon; }
    bool uses_anchors() const override { return true; }
    Eigen::VectorXd init_params(Rng& rng) const override;
    Trajectory rollout(const Eigen::VectorXd& params, const StateFilter& filter) const override;
    Eigen::VectorXd embed(const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& anchors) const override;
    /// Final x-displacement of a rollout, the mode indicator.
    double final_x_displacement(const Eigen::VectorXd& params, const StateFilter& filter) const;
    const MultiModalPointConfig& config() const { return cfg_; }
    const MlpSpec& mlp() const { return mlp_; }

private:
    MultiModalPointConfig cfg_;
    MlpSpec mlp_;
};

} // namespace dvd

#endif
