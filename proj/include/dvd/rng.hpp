#ifndef DVD_RNG_HPP
#define DVD_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace dvd {

/// Seeded generator wrapper. All stochastic components draw from an
/// explicitly owned Rng so that runs are reproducible from the config seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }

    /// Uniform integer in [0, n).
    std::uint64_t integer(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
        return dist(gen_);
    }

    double gamma(double shape) {
        std::gamma_distribution<double> dist(shape, 1.0);
        return dist(gen_);
    }

    double beta(double alpha, double beta) {
        const double x = gamma(alpha);
        const double y = gamma(beta);
        return x / (x + y);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Derives an independent stream seed from a base seed and a stream tag
/// (splitmix64 finalizer). Used to decouple e.g. bandit draws from
/// perturbation draws so adding one consumer does not shift another.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace dvd

#endif
