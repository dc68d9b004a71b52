#include "dvd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace dvd {

namespace {

constexpr double kJitterStart = 1e-12;
constexpr double kJitterMax = 1e-8;
constexpr double kDetUnderflow = 1e-300;

void check_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("eval_kernel: dimension mismatch");
    if (!x.allFinite() || !y.allFinite())
        throw std::invalid_argument("eval_kernel: non-finite input");
}

} // namespace

const std::vector<KernelKind>& all_kernel_kinds() {
    static const std::vector<KernelKind> kinds = {
        KernelKind::SquaredExponential, KernelKind::Exponential,
        KernelKind::LinearNormalized,   KernelKind::RationalQuadratic,
        KernelKind::Matern32,           KernelKind::Matern52,
    };
    return kinds;
}

std::string kernel_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::SquaredExponential: return "se";
    case KernelKind::Exponential: return "exponential";
    case KernelKind::LinearNormalized: return "linear";
    case KernelKind::RationalQuadratic: return "rq";
    case KernelKind::Matern32: return "matern32";
    case KernelKind::Matern52: return "matern52";
    }
    throw std::logic_error("kernel_name: bad kind");
}

KernelKind parse_kernel(const std::string& name) {
    for (KernelKind k : all_kernel_kinds())
        if (kernel_name(k) == name) return k;
    throw std::invalid_argument("unknown kernel '" + name +
                                "' (valid: se, exponential, linear, rq, matern32, matern52)");
}

void KernelSpec::validate() const {
    if (!(length_scale > 0.0)) throw std::invalid_argument("length_scale must be > 0");
    if (!(rq_alpha > 0.0)) throw std::invalid_argument("rq_alpha must be > 0");
}

double eval_kernel(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    spec.validate();
    check_pair(x, y);
    const double l = spec.length_scale;
    switch (spec.kind) {
    case KernelKind::SquaredExponential: {
        const double r2 = (x - y).squaredNorm();
        return std::exp(-r2 / (2.0 * l * l));
    }
    case KernelKind::Exponential: {
        const double r = (x - y).norm();
        return std::exp(-r / l);
    }
    case KernelKind::LinearNormalized: {
        // Cosine-normalized inner product so the diagonal is exactly 1.
        const double nx = x.norm();
        const double ny = y.norm();
        if (nx == 0.0 && ny == 0.0) return 1.0;
        if (nx == 0.0 || ny == 0.0) return 0.0;
        return x.dot(y) / (nx * ny);
    }
    case KernelKind::RationalQuadratic: {
        const double r2 = (x - y).squaredNorm();
        const double a = spec.rq_alpha;
        return std::pow(1.0 + r2 / (2.0 * a * l * l), -a);
    }
    case KernelKind::Matern32: {
        const double ar = std::sqrt(3.0) * (x - y).norm() / l;
        return (1.0 + ar) * std::exp(-ar);
    }
    case KernelKind::Matern52: {
        const double r = (x - y).norm();
        const double ar = std::sqrt(5.0) * r / l;
        return (1.0 + ar + 5.0 * r * r / (3.0 * l * l)) * std::exp(-ar);
    }
    }
    throw std::logic_error("eval_kernel: bad kind");
}

Eigen::VectorXd eval_kernel_grad(const KernelSpec& spec, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
    spec.validate();
    check_pair(x, y);
    const double l = spec.length_scale;
    const Eigen::VectorXd diff = x - y;
    switch (spec.kind) {
    case KernelKind::SquaredExponential: {
        const double k = std::exp(-diff.squaredNorm() / (2.0 * l * l));
        return -k / (l * l) * diff;
    }
    case KernelKind::Exponential: {
        const double r = diff.norm();
        if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
        return -std::exp(-r / l) / (l * r) * diff;
    }
    case KernelKind::LinearNormalized: {
        const double nx = x.norm();
        const double ny = y.norm();
        if (nx == 0.0 || ny == 0.0) return Eigen::VectorXd::Zero(x.size());
        return y / (nx * ny) - x.dot(y) / (nx * nx * nx * ny) * x;
    }
    case KernelKind::RationalQuadratic: {
        const double a = spec.rq_alpha;
        const double u = 1.0 + diff.squaredNorm() / (2.0 * a * l * l);
        return -std::pow(u, -a - 1.0) / (l * l) * diff;
    }
    case KernelKind::Matern32: {
        const double s = std::sqrt(3.0) / l;
        const double r = diff.norm();
        return -s * s * std::exp(-s * r) * diff;
    }
    case KernelKind::Matern52: {
        const double s = std::sqrt(5.0) / l;
        const double r = diff.norm();
        return -(s * s / 3.0) * (1.0 + s * r) * std::exp(-s * r) * diff;
    }
    }
    throw std::logic_error("eval_kernel_grad: bad kind");
}

GramMatrix gram(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& embeddings) {
    spec.validate();
    const Eigen::Index m = static_cast<Eigen::Index>(embeddings.size());
    if (m < 1) throw std::invalid_argument("gram: need at least one embedding");
    for (const auto& e : embeddings)
        if (e.size() != embeddings.front().size())
            throw std::invalid_argument("gram: ragged embedding lengths");
    GramMatrix g;
    g.entries.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        g.entries(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double k = eval_kernel(spec, embeddings[i], embeddings[j]);
            g.entries(i, j) = k;
            g.entries(j, i) = k;
        }
    }
    return g;
}

namespace {

// Pivot products of the symmetric factorization. LDLT handles the exactly
// rank-deficient case (duplicate embeddings) without jitter; the ladder is
// only climbed when the factorization itself reports trouble.
bool pivot_logdet(const Eigen::MatrixXd& m, double& log_det, bool& singular) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = ldlt.vectorD();
    log_det = 0.0;
    singular = false;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] <= kDetUnderflow) {
            singular = true;
            return true;
        }
        log_det += std::log(d[i]);
    }
    return true;
}

} // namespace

double det(GramMatrix& g) {
    const double ld = logdet(g);
    if (ld == neg_infinity()) return 0.0;
    return std::clamp(std::exp(ld), 0.0, 1.0);
}

double logdet(GramMatrix& g) {
    if (!g.entries.allFinite()) throw std::invalid_argument("logdet: non-finite entries");
    double ld = 0.0;
    bool singular = false;
    if (pivot_logdet(g.entries, ld, singular)) {
        if (singular || ld <= std::log(kDetUnderflow)) return neg_infinity();
        return std::min(ld, 0.0); // unit-diagonal PSD: det <= 1
    }
    const Eigen::Index m = g.size();
    for (double jitter = kJitterStart; jitter <= kJitterMax * 1.5; jitter *= 10.0) {
        Eigen::MatrixXd k = g.entries + jitter * Eigen::MatrixXd::Identity(m, m);
        if (pivot_logdet(k, ld, singular)) {
            g.jitter_used = jitter;
            if (singular || ld <= std::log(kDetUnderflow)) return neg_infinity();
            return std::min(ld, 0.0);
        }
    }
    // Never factorizable: treat as rank deficient.
    g.jitter_used = kJitterMax;
    return neg_infinity();
}

std::vector<Eigen::VectorXd> grad_logdet_embeddings(const KernelSpec& spec,
                                                    const std::vector<Eigen::VectorXd>& embeddings) {
    const Eigen::Index m = static_cast<Eigen::Index>(embeddings.size());
    GramMatrix g = gram(spec, embeddings);
    const Eigen::Index dim = embeddings.front().size();
    if (m == 1) return {Eigen::VectorXd::Zero(dim)};

    Eigen::LLT<Eigen::MatrixXd> llt(g.entries);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("grad_logdet_embeddings: rank-deficient population");
    const Eigen::MatrixXd kinv =
        llt.solve(Eigen::MatrixXd::Identity(m, m));

    // d logdet / d e_a = sum_j (K^-1)_{aj} dK_{aj}/de_a + sum_i (K^-1)_{ia} dK_{ia}/de_a
    //                  = 2 sum_{j != a} (K^-1)_{aj} grad_x k(e_a, e_j).
    std::vector<Eigen::VectorXd> grads(m, Eigen::VectorXd::Zero(dim));
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == a) continue;
            grads[a] += 2.0 * kinv(a, j) * eval_kernel_grad(spec, embeddings[a], embeddings[j]);
        }
    }
    return grads;
}

} // namespace dvd
