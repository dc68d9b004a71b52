#include "dvd/policy.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dvd {

namespace {

constexpr std::uint32_t kMagic = 0x44764450; // "DvDP"

// Layer layout inside the flat vector: W1 (h x obs), b1, W2 (h x h), b2,
// W3 (act x h), b3. Row-major per layer.
struct Layout {
    int w1, b1, w2, b2, w3, b3;
};

Layout layout(const MlpSpec& s) {
    Layout l{};
    l.w1 = 0;
    l.b1 = l.w1 + s.hidden * s.obs_dim;
    l.w2 = l.b1 + s.hidden;
    l.b2 = l.w2 + s.hidden * s.hidden;
    l.w3 = l.b2 + s.hidden;
    l.b3 = l.w3 + s.act_dim * s.hidden;
    return l;
}

Eigen::VectorXd affine_tanh(const Eigen::VectorXd& params, int w_off, int b_off, int rows,
                            const Eigen::VectorXd& in) {
    Eigen::VectorXd out(rows);
    const int cols = static_cast<int>(in.size());
    for (int r = 0; r < rows; ++r) {
        double acc = params[b_off + r];
        const int base = w_off + r * cols;
        for (int c = 0; c < cols; ++c) acc += params[base + c] * in[c];
        out[r] = std::tanh(acc);
    }
    return out;
}

} // namespace

void MlpSpec::validate() const {
    if (obs_dim <= 0 || act_dim <= 0 || hidden <= 0)
        throw std::invalid_argument("MlpSpec: dimensions must be positive");
}

Eigen::VectorXd init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(spec.param_count());
    const Layout l = layout(spec);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(spec.obs_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden));
    for (int i = 0; i < spec.hidden * spec.obs_dim; ++i) p[l.w1 + i] = s1 * rng.normal();
    for (int i = 0; i < spec.hidden * spec.hidden; ++i) p[l.w2 + i] = s2 * rng.normal();
    for (int i = 0; i < spec.act_dim * spec.hidden; ++i) p[l.w3 + i] = s2 * rng.normal();
    return p;
}

Eigen::VectorXd forward(const Eigen::VectorXd& params, const MlpSpec& spec,
                        const Eigen::VectorXd& obs) {
    spec.validate();
    if (params.size() != spec.param_count())
        throw std::invalid_argument("forward: parameter length mismatch");
    if (obs.size() != spec.obs_dim)
        throw std::invalid_argument("forward: observation dimension mismatch");
    const Layout l = layout(spec);
    const Eigen::VectorXd h1 = affine_tanh(params, l.w1, l.b1, spec.hidden, obs);
    const Eigen::VectorXd h2 = affine_tanh(params, l.w2, l.b2, spec.hidden, h1);
    return affine_tanh(params, l.w3, l.b3, spec.act_dim, h2);
}

Eigen::VectorXd perturb(const Eigen::VectorXd& params, double sigma, const Eigen::VectorXd& g) {
    if (params.size() != g.size())
        throw std::invalid_argument("perturb: length mismatch");
    return params + sigma * g;
}

void save_params(const std::string& path, const MlpSpec& spec, std::uint64_t seed,
                 const Eigen::VectorXd& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_params: cannot open " + path);
    auto put32 = [&](std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<char*>(b), 4);
    };
    auto put64 = [&](std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<char*>(b), 8);
    };
    put32(kMagic);
    put32(static_cast<std::uint32_t>(spec.obs_dim));
    put32(static_cast<std::uint32_t>(spec.act_dim));
    put32(static_cast<std::uint32_t>(spec.hidden));
    put64(seed);
    put64(static_cast<std::uint64_t>(params.size()));
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        std::uint64_t bits;
        double v = params[i];
        std::memcpy(&bits, &v, 8);
        put64(bits);
    }
}

Eigen::VectorXd load_params(const std::string& path, MlpSpec& spec, std::uint64_t& seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_params: cannot open " + path);
    auto get32 = [&]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    };
    auto get64 = [&]() {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    };
    if (get32() != kMagic) throw std::runtime_error("load_params: bad header in " + path);
    spec.obs_dim = static_cast<int>(get32());
    spec.act_dim = static_cast<int>(get32());
    spec.hidden = static_cast<int>(get32());
    seed = get64();
    const std::uint64_t n = get64();
    if (n != static_cast<std::uint64_t>(spec.param_count()))
        throw std::runtime_error("load_params: length does not match dims");
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t bits = get64();
        double v;
        std::memcpy(&v, &bits, 8);
        p[static_cast<Eigen::Index>(i)] = v;
    }
    if (!in) throw std::runtime_error("load_params: truncated file " + path);
    return p;
}

} // namespace dvd
