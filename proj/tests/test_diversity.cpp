#include "doctest.h"

#include <cmath>

#include "dvd/diversity.hpp"
#include "dvd/envs.hpp"

using namespace dvd;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_CASE("mean pairwise distance closed forms") {
    // M = 2: one pair, prefactor 1/2.
    std::vector<Eigen::VectorXd> two = {vec2(0, 0), vec2(3, 4)};
    CHECK(mean_pairwise_distance(two) == doctest::Approx(2.5));
    // unit square: 4 sides + 2 diagonals, over M = 4
    std::vector<Eigen::VectorXd> square = {vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)};
    CHECK(mean_pairwise_distance(square) ==
          doctest::Approx((4.0 + 2.0 * std::sqrt(2.0)) / 4.0).epsilon(1e-12));
    CHECK_THROWS_AS(mean_pairwise_distance({vec2(1, 1)}), std::invalid_argument);
}

TEST_CASE("novelty carries the population prefactor") {
    std::vector<Eigen::VectorXd> two = {vec2(0, 0), vec2(0, 4)};
    // distance 4 to the only other agent, divided by M = 2
    CHECK(novelty(0, two) == doctest::Approx(2.0));
    CHECK(novelty(1, two) == doctest::Approx(2.0));
    std::vector<Eigen::VectorXd> three = {vec2(0, 0), vec2(3, 0), vec2(0, 3)};
    CHECK(novelty(0, three) == doctest::Approx(6.0 / 3.0));
}

TEST_CASE("the optimal tabular population has positive determinant") {
    KernelSpec kernel;
    const auto optimal = tabular_optimal_embeddings();
    CHECK(population_diversity(optimal, kernel) == doctest::Approx(0.53868476802).epsilon(1e-9));
    auto duplicated = optimal;
    duplicated[2] = duplicated[4];
    CHECK(population_diversity(duplicated, kernel) == 0.0);
    // ... while the distance-based score still rewards the duplicate set
    CHECK(mean_pairwise_distance(duplicated) > mean_pairwise_distance(optimal));
}

TEST_CASE("population diversity is permutation invariant") {
    Rng rng(13);
    KernelSpec kernel;
    std::vector<Eigen::VectorXd> e;
    for (int i = 0; i < 5; ++i) e.push_back(rng.normal_vector(3));
    const double base = population_diversity(e, kernel);
    std::vector<Eigen::VectorXd> shuffled = {e[4], e[2], e[0], e[3], e[1]};
    CHECK(population_diversity(shuffled, kernel) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("first order expansion closed form and guard") {
    std::vector<Eigen::VectorXd> two = {vec2(0, 0), vec2(1, 0)};
    CHECK(first_order_det_approx(two, 1.0) == doctest::Approx(0.5));
    CHECK(first_order_det_approx(two, 2.0) == doctest::Approx(0.125));
    std::vector<Eigen::VectorXd> four = {vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 1)};
    CHECK_THROWS_AS(first_order_det_approx(four, 1.0), std::invalid_argument);
}

TEST_CASE("tight clusters fool distance but not the determinant") {
    Rng rng(7);
    const DiversityReport r = clustering_demo(3, 4, 10.0, 1e-3, rng);
    CHECK(r.determinant < 1e-6);
    CHECK(r.mean_pairwise_distance > 1.0);
    CHECK(r.per_agent_novelty.size() == 12);
    for (double n : r.per_agent_novelty) CHECK(n > 1.0);

    // doubling the separation roughly doubles the distance score
    Rng rng2(7);
    const DiversityReport r2 = clustering_demo(3, 4, 20.0, 1e-3, rng2);
    CHECK(r2.determinant < 1e-6);
    CHECK(r2.mean_pairwise_distance / r.mean_pairwise_distance == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("diversity report is consistent with its parts") {
    Rng rng(19);
    KernelSpec kernel;
    std::vector<Eigen::VectorXd> e;
    for (int i = 0; i < 4; ++i) e.push_back(rng.normal_vector(2));
    const DiversityReport r = diversity_report(e, kernel);
    CHECK(r.determinant == doctest::Approx(population_diversity(e, kernel)));
    CHECK(r.mean_pairwise_distance == doctest::Approx(mean_pairwise_distance(e)));
    CHECK(std::exp(r.log_determinant) == doctest::Approx(r.determinant).epsilon(1e-10));
    REQUIRE(r.per_agent_novelty.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(r.per_agent_novelty[i] == doctest::Approx(novelty(i, e)));
}
