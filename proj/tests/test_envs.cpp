#include "doctest.h"

#include <cmath>

#include "dvd/envs.hpp"

using namespace dvd;

TEST_CASE("tabular transitions and payouts") {
    TabularStep s = tabular_transition(0, 0); // down from the root
    CHECK_FALSE(s.terminal);
    CHECK(s.next_state == 2);
    s = tabular_transition(2, 0); // down from s2 lands on T3
    CHECK(s.terminal);
    CHECK(s.terminal_id == 2);
    CHECK(s.reward == 1.0);
    s = tabular_transition(1, 0); // down from s1 lands on T2
    CHECK(s.terminal);
    CHECK(s.terminal_id == 1);
    CHECK(s.reward == 0.0);
    s = tabular_transition(0, 1);
    CHECK(s.next_state == 3);
    s = tabular_transition(3, 1); // right, right lands on T5
    CHECK(s.terminal);
    CHECK(s.terminal_id == 4);
    CHECK(s.reward == 1.0);
    CHECK_THROWS(tabular_transition(0, 2));
    CHECK_THROWS(tabular_transition(7, 0));
}

TEST_CASE("three of the five terminals pay") {
    int paying = 0;
    for (int t = 0; t < kTabularTerminals; ++t)
        if (tabular_terminal_reward(t) > 0.0) ++paying;
    CHECK(paying == 3);
}

TEST_CASE("greedy logit policy with left-first tie break") {
    Eigen::VectorXd logits = Eigen::VectorXd::Zero(12);
    CHECK(tabular_policy_action(logits, 0) == -1); // all ties -> left
    logits[0 * 3 + 2] = 1.0;
    CHECK(tabular_policy_action(logits, 0) == 1);
    logits[2 * 3 + 1] = 0.5;
    CHECK(tabular_policy_action(logits, 2) == 0);
}

TEST_CASE("tabular enumeration oracle") {
    KernelSpec kernel;
    const TabularOracleReport r = enumerate_tabular(kernel);
    CHECK(r.embeddings.size() == 9);
    CHECK(r.positive_count == 5);
    CHECK(r.det_optimal > 0.0);
    CHECK(r.det_optimal == doctest::Approx(0.53868476802).epsilon(1e-9));
    CHECK(r.only_optimal_has_positive_det);
    CHECK(r.distance_prefers_duplicate);
    CHECK(r.d_duplicate > r.d_optimal);

    KernelSpec linear;
    linear.kind = KernelKind::LinearNormalized;
    const TabularOracleReport rl = enumerate_tabular(linear);
    // [0,0] embeds to the zero vector, which the normalized linear kernel
    // treats as orthogonal to everything, so the optimal det stays positive.
    CHECK(rl.only_optimal_has_positive_det);
}

TEST_CASE("tabular rollout matches the embedding") {
    Eigen::VectorXd logits = Eigen::VectorXd::Zero(12);
    logits[0 * 3 + 1] = 1.0; // root: down
    logits[2 * 3 + 1] = 1.0; // s2: down -> T3 (+1)
    TabularTask task;
    StateFilter filter;
    const Trajectory traj = task.rollout(logits, filter);
    CHECK(traj.total_reward == 1.0);
    CHECK(traj.actions.size() == 2);
    const Eigen::VectorXd e = task.embed(logits, {});
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.0);
}

TEST_CASE("state filter matches a two-pass computation") {
    Rng rng(21);
    StateFilter filter(3);
    std::vector<Eigen::VectorXd> data;
    for (int i = 0; i < 200; ++i) {
        data.push_back(rng.normal_vector(3) * 2.0);
        filter.observe(data.back());
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (const auto& x : data) mean += x;
    mean /= 200.0;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(3);
    for (const auto& x : data) var += (x - mean).cwiseAbs2();
    var /= 200.0;
    CHECK((filter.mean() - mean).norm() <= 1e-10);
    CHECK((filter.variance() - var).norm() <= 1e-10);
    for (int d = 0; d < 3; ++d) CHECK(filter.variance()[d] >= 0.0);
}

TEST_CASE("state filter identity until first observation") {
    StateFilter filter;
    Eigen::VectorXd x(2);
    x << 4.0, -2.0;
    CHECK((filter.apply(x) - x).norm() == 0.0);
    filter.observe(x);
    CHECK(filter.count() == 1);
    // single observation: zero variance, output is zero up to the 1e-8 floor
    CHECK(filter.apply(x).norm() == 0.0);
    Eigen::VectorXd bad(3);
    CHECK_THROWS(filter.observe(bad));
}

TEST_CASE("point step geometry") {
    PointWallConfig cfg;
    auto [same, r0] = point_step(cfg, {1.0, 1.0}, {0.0, 0.0});
    CHECK((same - Eigen::Vector2d(1.0, 1.0)).norm() == 0.0);
    CHECK(r0 == doctest::Approx(-(Eigen::Vector2d(1, 1) - cfg.goal).norm()));

    // crossing the wall stops just short of it
    auto [blocked, rb] = point_step(cfg, {0.0, 2.9}, {0.0, 1.0});
    CHECK(blocked.y() < 3.0);
    CHECK(blocked.y() > 2.99);
    CHECK(rb == doctest::Approx(-(blocked - cfg.goal).norm()));

    // beyond the wall's right end the path is free
    auto [free, rf] = point_step(cfg, {5.0, 2.9}, {0.0, 1.0});
    CHECK(free.y() == doctest::Approx(3.15));
    (void)rf;
}

TEST_CASE("plateau and detour reference rewards") {
    PointWallConfig cfg;
    const double plateau = straight_line_reward(cfg);
    const double detour = go_around_reward(cfg);
    CHECK(plateau == doctest::Approx(-166.500039).epsilon(1e-6));
    CHECK(detour > plateau);
    CHECK(detour == doctest::Approx(-134.935856).epsilon(1e-4));
}

TEST_CASE("zero policy sits at the start forever") {
    PointTask task;
    StateFilter filter;
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(task.param_dim());
    const Trajectory traj = task.rollout(zeros, filter);
    CHECK(traj.observations.size() == 50);
    CHECK(traj.total_reward == doctest::Approx(-300.0)); // 50 steps at distance 6
}

TEST_CASE("multimodal reward is the final x displacement magnitude") {
    MultiModalPointTask task;
    StateFilter filter;
    Rng rng(5);
    const Eigen::VectorXd params = task.init_params(rng);
    const Trajectory traj = task.rollout(params, filter);
    const double disp = task.final_x_displacement(params, filter);
    CHECK(traj.total_reward == doctest::Approx(std::abs(disp)).epsilon(1e-12));
    // a full-speed right policy covers max_step per step
    CHECK(std::abs(disp) <= 50 * 0.25 + 1e-12);
}

TEST_CASE("multimodal task is mirror symmetric in x") {
    MultiModalPointTask task;
    const MlpSpec& mlp = task.mlp();
    Rng rng(31);
    const Eigen::VectorXd params = task.init_params(rng);
    // Reflect the policy: negate the x input column of W1 and the x output
    // row of W3 (layout: W1, b1, W2, b2, W3, b3; row-major).
    Eigen::VectorXd mirrored = params;
    const int h = mlp.hidden;
    for (int r = 0; r < h; ++r) mirrored[r * 2 + 0] = -params[r * 2 + 0];
    const int w3 = h * 2 + h + h * h + h;
    for (int c = 0; c < h; ++c) mirrored[w3 + c] = -params[w3 + c];
    StateFilter filter;
    const double d = task.final_x_displacement(params, filter);
    const double dm = task.final_x_displacement(mirrored, filter);
    CHECK(dm == doctest::Approx(-d).epsilon(1e-12));
    CHECK(task.rollout(params, filter).total_reward ==
          doctest::Approx(task.rollout(mirrored, filter).total_reward).epsilon(1e-12));
}
