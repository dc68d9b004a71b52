#ifndef DVD_KERNELS_HPP
#define DVD_KERNELS_HPP

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dvd {

enum class KernelKind {
    SquaredExponential,
    Exponential,
    LinearNormalized,
    RationalQuadratic,
    Matern32,
    Matern52,
};

const std::vector<KernelKind>& all_kernel_kinds();
std::string kernel_name(KernelKind kind);
KernelKind parse_kernel(const std::string& name);

struct KernelSpec {
    KernelKind kind = KernelKind::SquaredExponential;
    double length_scale = 1.0;
    double rq_alpha = 1.0; // RationalQuadratic only

    void validate() const;
};

/// Similarity matrix over a population of embeddings. Unit diagonal by
/// construction; jitter_used records any diagonal addition needed to
/// factorize a numerically singular matrix.
struct GramMatrix {
    Eigen::MatrixXd entries;
    double jitter_used = 0.0;

    Eigen::Index size() const { return entries.rows(); }
};

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Analytic derivative of eval_kernel with respect to its first argument.
Eigen::VectorXd eval_kernel_grad(const KernelSpec& spec, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y);

GramMatrix gram(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& embeddings);

/// Determinant via symmetric factorization; escalating jitter (1e-12 up to
/// 1e-8) on failure, recorded in g.jitter_used; 0 when factorization never
/// succeeds. Result clamped to [0, 1].
double det(GramMatrix& g);

/// log det via pivot sums; returns neg_infinity() when det underflows.
double logdet(GramMatrix& g);

inline double neg_infinity() { return -std::numeric_limits<double>::infinity(); }

/// Gradients of log det(gram(spec, embeddings)) with respect to each
/// embedding, assembled from the kernel's analytic entry derivatives and
/// the inverse Gram matrix. Throws if the Gram matrix is numerically
/// singular (rank-deficient population).
std::vector<Eigen::VectorXd> grad_logdet_embeddings(const KernelSpec& spec,
                                                    const std::vector<Eigen::VectorXd>& embeddings);

} // namespace dvd

#endif
