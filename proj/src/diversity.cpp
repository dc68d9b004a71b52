#include "dvd/diversity.hpp"

#include <cmath>
#include <stdexcept>

namespace dvd {

double population_diversity(const std::vector<Eigen::VectorXd>& embeddings,
                            const KernelSpec& spec) {
    GramMatrix g = gram(spec, embeddings);
    return det(g);
}

double mean_pairwise_distance(const std::vector<Eigen::VectorXd>& embeddings) {
    const std::size_t m = embeddings.size();
    if (m < 2) throw std::invalid_argument("mean_pairwise_distance: need at least 2 embeddings");
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            sum += (embeddings[i] - embeddings[j]).norm();
    return sum / static_cast<double>(m);
}

double novelty(std::size_t index, const std::vector<Eigen::VectorXd>& embeddings) {
    const std::size_t m = embeddings.size();
    if (m < 2) throw std::invalid_argument("novelty: need at least 2 embeddings");
    if (index >= m) throw std::out_of_range("novelty: index out of range");
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        if (j != index) sum += (embeddings[index] - embeddings[j]).norm();
    return sum / static_cast<double>(m);
}

double first_order_det_approx(const std::vector<Eigen::VectorXd>& embeddings, double length_scale) {
    const std::size_t m = embeddings.size();
    if (m < 2 || m > 3)
        throw std::invalid_argument(
            "first_order_det_approx: only defined for M in {2,3}; the term vanishes for M > 3");
    if (!(length_scale > 0.0)) throw std::invalid_argument("length_scale must be > 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            sum += (embeddings[i] - embeddings[j]).squaredNorm();
    return 0.5 * sum / (length_scale * length_scale);
}

DiversityReport diversity_report(const std::vector<Eigen::VectorXd>& embeddings,
                                 const KernelSpec& spec) {
    DiversityReport report;
    GramMatrix g = gram(spec, embeddings);
    report.log_determinant = logdet(g);
    report.determinant =
        report.log_determinant == neg_infinity() ? 0.0 : population_diversity(embeddings, spec);
    if (embeddings.size() >= 2) {
        report.mean_pairwise_distance = mean_pairwise_distance(embeddings);
        for (std::size_t i = 0; i < embeddings.size(); ++i)
            report.per_agent_novelty.push_back(novelty(i, embeddings));
    }
    return report;
}

DiversityReport clustering_demo(int k_clusters, int per_cluster, double separation, double spread,
                                Rng& rng) {
    if (k_clusters < 2 || per_cluster < 2)
        throw std::invalid_argument("clustering_demo: need >= 2 clusters of >= 2 agents");
    const int dim = 2;
    std::vector<Eigen::VectorXd> embeddings;
    for (int c = 0; c < k_clusters; ++c) {
        // Cluster centers on a circle of radius `separation`.
        const double angle = 2.0 * M_PI * c / k_clusters;
        Eigen::VectorXd center(dim);
        center << separation * std::cos(angle), separation * std::sin(angle);
        for (int a = 0; a < per_cluster; ++a)
            embeddings.push_back(center + spread * rng.normal_vector(dim));
    }
    return diversity_report(embeddings, KernelSpec{});
}

} // namespace dvd
