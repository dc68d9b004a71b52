#ifndef DVD_POLICY_HPP
#define DVD_POLICY_HPP

#include <string>

#include <Eigen/Core>

#include "dvd/rng.hpp"

namespace dvd {

/// Two-hidden-layer tanh network with tanh-squashed outputs, so every
/// action component lies in [-1, 1]. Parameters live in a single flat
/// vector so ES can perturb them directly.
struct MlpSpec {
    int obs_dim = 0;
    int act_dim = 0;
    int hidden = 16; // both hidden layers share this width

    int param_count() const {
        return (obs_dim + 1) * hidden + (hidden + 1) * hidden + (hidden + 1) * act_dim;
    }
    void validate() const;
};

/// Fan-in scaled Gaussian weights, zero biases.
Eigen::VectorXd init_params(const MlpSpec& spec, Rng& rng);

Eigen::VectorXd forward(const Eigen::VectorXd& params, const MlpSpec& spec,
                        const Eigen::VectorXd& obs);

Eigen::VectorXd perturb(const Eigen::VectorXd& params, double sigma, const Eigen::VectorXd& g);

/// Flat little-endian float64 checkpoint with a small dims/seed header.
void save_params(const std::string& path, const MlpSpec& spec, std::uint64_t seed,
                 const Eigen::VectorXd& params);
Eigen::VectorXd load_params(const std::string& path, MlpSpec& spec, std::uint64_t& seed);

} // namespace dvd

#endif
