#include "doctest.h"

#include <cmath>

#include "dvd/bandit.hpp"

using namespace dvd;

TEST_CASE("construction validates the arm set") {
    CHECK_THROWS_AS(BanditState({}, 0), std::invalid_argument);
    CHECK_THROWS_AS(BanditState({0.0, 0.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(BanditState({0.5, 1.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(BanditState({-0.1}, 0), std::invalid_argument);
    BanditState ok({0.0, 0.5}, 0);
    CHECK(ok.arms().size() == 2);
    CHECK_FALSE(ok.last_chosen().has_value());
}

TEST_CASE("posterior counts follow the conjugate update") {
    BanditState bandit({0.0, 0.5}, 7);
    const std::vector<int> outcomes = {1, 1, 0, 1, 0};
    int wins0 = 0, losses0 = 0, wins1 = 0, losses1 = 0;
    for (int r : outcomes) {
        const auto [arm, lambda] = bandit.sample_lambda();
        CHECK(lambda == bandit.arms()[arm].lambda_value);
        CHECK(bandit.last_chosen() == arm);
        bandit.update(arm, r);
        (arm == 0 ? (r ? wins0 : losses0) : (r ? wins1 : losses1))++;
    }
    CHECK(bandit.arms()[0].alpha == 1.0 + wins0);
    CHECK(bandit.arms()[0].beta == 1.0 + losses0);
    CHECK(bandit.arms()[1].alpha == 1.0 + wins1);
    CHECK(bandit.arms()[1].beta == 1.0 + losses1);
}

TEST_CASE("update guards") {
    BanditState bandit({0.0, 0.5}, 3);
    CHECK_THROWS_AS(bandit.update(0, 1), std::logic_error); // nothing sampled yet
    const auto [arm, lambda] = bandit.sample_lambda();
    CHECK_THROWS_AS(bandit.update(1 - arm, 1), std::logic_error);
    CHECK_THROWS_AS(bandit.update(arm, 2), std::invalid_argument);
    bandit.update(arm, 1); // the valid call still works
}

TEST_CASE("a dominant posterior wins nearly every draw") {
    BanditState bandit({0.1, 0.9}, 11);
    // Force extreme posteriors through repeated updates.
    for (int i = 0; i < 999; ++i) {
        while (bandit.sample_lambda().first != 0) bandit.update(*bandit.last_chosen(), 0);
        bandit.update(0, 1);
    }
    int wins = 0;
    for (int i = 0; i < 1000; ++i)
        if (bandit.sample_lambda().first == 0) ++wins;
    CHECK(wins >= 999);
}

TEST_CASE("thompson sampling concentrates on the better arm") {
    // Bernoulli environment: arm 0 pays with p=0.8, arm 1 with p=0.2.
    int chose_better = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        BanditState bandit({0.0, 0.5}, seed);
        Rng env(1000 + seed);
        for (int t = 0; t < 500; ++t) {
            const auto [arm, lambda] = bandit.sample_lambda();
            const double p = arm == 0 ? 0.8 : 0.2;
            bandit.update(arm, env.uniform() < p ? 1 : 0);
        }
        int late = 0;
        for (int t = 0; t < 100; ++t) {
            const auto [arm, lambda] = bandit.sample_lambda();
            if (arm == 0) ++late;
            bandit.update(arm, env.uniform() < (arm == 0 ? 0.8 : 0.2) ? 1 : 0);
        }
        if (late >= 90) ++chose_better;
    }
    CHECK(chose_better >= 18);
}

TEST_CASE("unchosen arms are untouched bitwise") {
    BanditState bandit({0.0, 0.5, 0.8}, 5);
    const auto before = bandit.arms();
    const auto [arm, lambda] = bandit.sample_lambda();
    bandit.update(arm, 1);
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (i == arm) continue;
        CHECK(bandit.arms()[i].alpha == before[i].alpha);
        CHECK(bandit.arms()[i].beta == before[i].beta);
    }
}

TEST_CASE("reward signal is a strict improvement indicator") {
    CHECK(reward_signal(-800.0, -600.0) == 1);
    CHECK(reward_signal(-600.0, -800.0) == 0);
    CHECK(reward_signal(10.0, 10.0) == 0);
    CHECK_THROWS_AS(reward_signal(0.0, std::nan("")), std::invalid_argument);
}
