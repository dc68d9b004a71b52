#include "doctest.h"

#include <cmath>

#include "dvd/kernels.hpp"
#include "dvd/rng.hpp"

using namespace dvd;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

std::vector<Eigen::VectorXd> random_embeddings(Rng& rng, int m, int dim, double scale = 1.0) {
    std::vector<Eigen::VectorXd> e;
    for (int i = 0; i < m; ++i) e.push_back(scale * rng.normal_vector(dim));
    return e;
}

} // namespace

TEST_CASE("kernel names round trip") {
    for (KernelKind k : all_kernel_kinds()) CHECK(parse_kernel(kernel_name(k)) == k);
    CHECK_THROWS_AS(parse_kernel("gaussian"), std::invalid_argument);
    CHECK(all_kernel_kinds().size() == 6);
}

TEST_CASE("squared exponential closed form") {
    KernelSpec spec; // SE, l=1
    // r = sqrt(2) gives exp(-1)
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 1)) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(eval_kernel(spec, vec2(3, 4), vec2(3, 4)) == 1.0);
    spec.length_scale = 2.0;
    CHECK(eval_kernel(spec, vec2(2, 0), vec2(0, 0)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("squared exponential strictly decreases in distance") {
    KernelSpec spec;
    double prev = 1.0;
    for (double r = 0.25; r < 5.0; r += 0.25) {
        const double k = eval_kernel(spec, vec2(r, 0), vec2(0, 0));
        CHECK(k < prev);
        prev = k;
    }
}

TEST_CASE("exponential, rq and matern closed forms") {
    KernelSpec spec;
    spec.kind = KernelKind::Exponential;
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    spec.kind = KernelKind::RationalQuadratic; // (1 + r^2/2)^-1 at l=1, alpha=1
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    spec.kind = KernelKind::Matern32;
    const double a3 = std::sqrt(3.0);
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 0)) ==
          doctest::Approx((1 + a3) * std::exp(-a3)).epsilon(1e-14));
    spec.kind = KernelKind::Matern52;
    const double a5 = std::sqrt(5.0);
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 0)) ==
          doctest::Approx((1 + a5 + 5.0 / 3.0) * std::exp(-a5)).epsilon(1e-14));
}

TEST_CASE("normalized linear kernel conventions") {
    KernelSpec spec;
    spec.kind = KernelKind::LinearNormalized;
    CHECK(eval_kernel(spec, vec2(1, 0), vec2(0, 1)) == doctest::Approx(0.0));
    CHECK(eval_kernel(spec, vec2(2, 0), vec2(5, 0)) == doctest::Approx(1.0));
    CHECK(eval_kernel(spec, vec2(0, 0), vec2(1, 1)) == 0.0);
    CHECK(eval_kernel(spec, vec2(0, 0), vec2(0, 0)) == 1.0);
}

TEST_CASE("gram matrix has exact unit diagonal and symmetry") {
    Rng rng(11);
    for (KernelKind kind : all_kernel_kinds()) {
        KernelSpec spec;
        spec.kind = kind;
        auto e = random_embeddings(rng, 5, 4);
        GramMatrix g = gram(spec, e);
        for (int i = 0; i < 5; ++i) {
            CHECK(g.entries(i, i) == 1.0);
            for (int j = 0; j < 5; ++j) CHECK(g.entries(i, j) == g.entries(j, i));
        }
        CHECK(g.jitter_used == 0.0);
    }
}

TEST_CASE("two by two determinant closed form") {
    KernelSpec spec;
    spec.length_scale = 1.0;
    // distance 1 -> k = exp(-1/2), det = 1 - exp(-1)
    std::vector<Eigen::VectorXd> e = {vec2(0, 0), vec2(1, 0)};
    GramMatrix g = gram(spec, e);
    CHECK(det(g) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(logdet(g) == doctest::Approx(std::log(1.0 - std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("duplicate embeddings are rank deficient") {
    KernelSpec spec;
    std::vector<Eigen::VectorXd> e = {vec2(1, 2), vec2(1, 2), vec2(0, 1)};
    GramMatrix g = gram(spec, e);
    // the jitter ladder leaves only a vanishing determinant
    CHECK(det(g) <= 1e-10);
    CHECK(g.jitter_used > 0.0);
    GramMatrix g2 = gram(spec, e);
    CHECK(logdet(g2) < -20.0);
}

TEST_CASE("determinant respects the unit bound on random populations") {
    Rng rng(42);
    for (KernelKind kind : all_kernel_kinds()) {
        KernelSpec spec;
        spec.kind = kind;
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 2 + static_cast<int>(rng.integer(6));
            auto e = random_embeddings(rng, m, 3, 2.0);
            GramMatrix g = gram(spec, e);
            const double d = det(g);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
        }
    }
}

TEST_CASE("determinant is permutation invariant") {
    Rng rng(5);
    KernelSpec spec;
    auto e = random_embeddings(rng, 6, 4);
    GramMatrix g = gram(spec, e);
    const double base = det(g);
    std::vector<Eigen::VectorXd> shuffled = {e[3], e[0], e[5], e[1], e[4], e[2]};
    GramMatrix gs = gram(spec, shuffled);
    CHECK(det(gs) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("linear kernel rank law") {
    KernelSpec spec;
    spec.kind = KernelKind::LinearNormalized;
    Rng rng(3);
    // four embeddings inside a 2-dimensional subspace of R^5
    const Eigen::VectorXd b1 = rng.normal_vector(5), b2 = rng.normal_vector(5);
    std::vector<Eigen::VectorXd> e;
    for (int i = 0; i < 4; ++i) e.push_back(rng.normal() * b1 + rng.normal() * b2);
    GramMatrix g = gram(spec, e);
    CHECK(det(g) <= 1e-9);
}

TEST_CASE("grad_logdet matches finite differences") {
    Rng rng(123);
    for (KernelKind kind : all_kernel_kinds()) {
        KernelSpec spec;
        spec.kind = kind;
        spec.length_scale = 1.5;
        auto e = random_embeddings(rng, 3, 6);
        const auto grads = grad_logdet_embeddings(spec, e);
        REQUIRE(grads.size() == 3);
        const double h = 1e-6;
        for (std::size_t m = 0; m < e.size(); ++m) {
            for (int d = 0; d < 6; ++d) {
                auto lo = e, hi = e;
                hi[m][d] += h;
                lo[m][d] -= h;
                GramMatrix ghi = gram(spec, hi), glo = gram(spec, lo);
                const double fd = (logdet(ghi) - logdet(glo)) / (2 * h);
                CHECK(grads[m][d] == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("grad_logdet corner cases") {
    KernelSpec spec;
    const auto single = grad_logdet_embeddings(spec, {vec2(1, 2)});
    CHECK(single.size() == 1);
    CHECK(single[0].norm() == 0.0);
    CHECK_THROWS(grad_logdet_embeddings(spec, {vec2(1, 2), vec2(1, 2)}));
}

TEST_CASE("spec validation") {
    KernelSpec spec;
    spec.length_scale = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.length_scale = 1.0;
    spec.kind = KernelKind::RationalQuadratic;
    spec.rq_alpha = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
