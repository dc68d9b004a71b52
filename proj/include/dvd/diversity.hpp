#ifndef DVD_DIVERSITY_HPP
#define DVD_DIVERSITY_HPP

#include <vector>

#include <Eigen/Core>

#include "dvd/kernels.hpp"
#include "dvd/rng.hpp"

namespace dvd {

struct DiversityReport {
    double determinant = 0.0;
    double log_determinant = 0.0; // neg_infinity() marks rank deficiency
    double mean_pairwise_distance = 0.0;
    std::vector<double> per_agent_novelty;
};

/// det of the kernel matrix over the population's embeddings.
double population_diversity(const std::vector<Eigen::VectorXd>& embeddings,
                            const KernelSpec& spec);

/// (1/M) sum_{i<j} ||e_i - e_j||.
double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& embeddings);

/// Mean distance of embedding m to the others, with the 1/M prefactor.
double novelty(std::size_t index, const std::vector<Eigen::VectorXd>& embeddings);

/// First-order expansion of the SE-kernel determinant in the pairwise
/// distances: (1/2) sum_{i<j} ||e_i - e_j||^2 / l^2. Only meaningful for
/// M in {2, 3}; throws for larger populations, where this term vanishes.
double first_order_det_approx(const std::vector<Eigen::VectorXd>& embeddings, double length_scale);

/// Generates k tight clusters of embeddings and reports their diversity
/// statistics: pairwise distance scales with the separation while the
/// determinant stays pinned near zero.
DiversityReport clustering_demo(int k_clusters, int per_cluster, double separation, double spread,
                                Rng& rng);

DiversityReport diversity_report(const std::vector<Eigen::VectorXd>& embeddings,
                                 const KernelSpec& spec);

} // namespace dvd

#endif
