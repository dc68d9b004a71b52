#include "dvd/es.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dvd/diversity.hpp"
#include "dvd/parallel.hpp"

namespace dvd {

std::string algo_name(Algo a) {
    switch (a) {
    case Algo::Vanilla: return "vanilla";
    case Algo::NsrEs: return "nsr";
    case Algo::DvdEs: return "dvd";
    }
    throw std::logic_error("algo_name: bad algo");
}

Algo parse_algo(const std::string& name) {
    if (name == "vanilla") return Algo::Vanilla;
    if (name == "nsr") return Algo::NsrEs;
    if (name == "dvd") return Algo::DvdEs;
    throw std::invalid_argument("unknown algo '" + name + "' (valid: vanilla, nsr, dvd)");
}

void EsConfig::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    if (sensings < 1) throw std::invalid_argument("sensings must be >= 1");
    if (population < 1) throw std::invalid_argument("population must be >= 1");
    if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    if (fixed_lambda && !(*fixed_lambda >= 0.0 && *fixed_lambda < 1.0))
        throw std::invalid_argument("fixed lambda must be in [0, 1)");
    if (mirrored && sensings % 2 != 0)
        throw std::invalid_argument("mirrored sampling needs an even sensing count");
    kernel.validate();
    embedding.validate();
}

PerturbationBlock draw_perturbations(int population, int sensings, int dim, Rng& rng) {
    if (population < 1 || sensings < 1 || dim < 1)
        throw std::invalid_argument("draw_perturbations: bad shape");
    PerturbationBlock block;
    block.g.reserve(population);
    for (int m = 0; m < population; ++m) {
        Eigen::MatrixXd g(dim, sensings);
        for (int i = 0; i < sensings; ++i) g.col(i) = rng.normal_vector(dim);
        block.g.push_back(std::move(g));
    }
    return block;
}

std::vector<double> normalize_scores(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd < 1e-12) return out;
    for (std::size_t i = 0; i < n; ++i) out[i] = (scores[i] - mean) / sd;
    return out;
}

namespace {

// Shared accumulation for every update path, so that paths meant to agree
// (dvd at lambda 0 versus plain vanilla) agree bitwise.
void apply_update(Eigen::VectorXd& theta, const Eigen::MatrixXd& g,
                  const std::vector<double>& coeffs, double eta, double sigma) {
    const int k = static_cast<int>(coeffs.size());
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(theta.size());
    for (int i = 0; i < k; ++i) delta += coeffs[i] * g.col(i);
    delta *= eta / (static_cast<double>(k) * sigma);

    double max_c = 0.0;
    for (double c : coeffs) max_c = std::max(max_c, std::abs(c));
    double max_g = 0.0;
    for (int i = 0; i < k; ++i) max_g = std::max(max_g, g.col(i).norm());
    const double bound = (eta / sigma) * max_c * max_g * (1.0 + 1e-9) + 1e-12;
    if (!(delta.norm() <= bound))
        throw std::logic_error("apply_update: step magnitude exceeds its bound");

    theta += delta;
}

struct EvalResult {
    std::vector<std::vector<double>> rewards;             // [M][k]
    std::vector<std::vector<Eigen::VectorXd>> embeddings; // [M][k], only when requested
    std::vector<double> agent_means;
    double best_sensing = 0.0;
    double best_agent_mean = 0.0;
};

// Rolls out every perturbed agent. Slot writes keep the result independent
// of the worker count; reductions and merges run afterwards in (m, i) order.
EvalResult evaluate_perturbed(const std::vector<Eigen::VectorXd>& population, const EsConfig& cfg,
                              const Task& task, const std::vector<Eigen::VectorXd>& anchors,
                              const StateFilter& filter, const PerturbationBlock& block,
                              bool with_embeddings, std::vector<Trajectory>* kept_trajectories,
                              std::vector<Eigen::VectorXd>* raw_merge) {
    const std::size_t M = population.size();
    const std::size_t k = static_cast<std::size_t>(cfg.sensings);
    if (block.g.size() != M) throw std::invalid_argument("perturbation block / population mismatch");
    for (std::size_t m = 0; m < M; ++m)
        if (block.g[m].rows() != population[m].size() || block.g[m].cols() != cfg.sensings)
            throw std::invalid_argument("perturbation block shape mismatch");

    std::vector<Trajectory> trajectories(M * k);
    std::vector<Eigen::VectorXd> embeddings(with_embeddings ? M * k : 0);
    parallel_for(M * k, [&](std::size_t slot) {
        const std::size_t m = slot / k;
        const std::size_t i = slot % k;
        const Eigen::VectorXd perturbed = population[m] + cfg.sigma * block.g[m].col(i);
        trajectories[slot] = task.rollout(perturbed, filter);
        if (with_embeddings) embeddings[slot] = task.embed(perturbed, anchors);
    });

    EvalResult out;
    out.rewards.assign(M, std::vector<double>(k, 0.0));
    if (with_embeddings) out.embeddings.assign(M, std::vector<Eigen::VectorXd>(k));
    out.agent_means.assign(M, 0.0);
    out.best_sensing = -std::numeric_limits<double>::infinity();
    out.best_agent_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t slot = m * k + i;
            const double r = trajectories[slot].total_reward;
            out.rewards[m][i] = r;
            sum += r;
            out.best_sensing = std::max(out.best_sensing, r);
            if (with_embeddings) out.embeddings[m][i] = embeddings[slot];
            if (raw_merge)
                for (const auto& obs : trajectories[slot].raw_observations) raw_merge->push_back(obs);
        }
        out.agent_means[m] = sum / static_cast<double>(k);
        out.best_agent_mean = std::max(out.best_agent_mean, out.agent_means[m]);
        if (kept_trajectories) kept_trajectories->push_back(trajectories[m * k]);
    }
    return out;
}

// Div_t(i): determinant of the population Gram matrix with every agent
// moved along its own column-i perturbation.
std::vector<double> column_determinants(const EvalResult& eval, const EsConfig& cfg) {
    const std::size_t M = eval.rewards.size();
    const std::size_t k = static_cast<std::size_t>(cfg.sensings);
    std::vector<double> div(k, 0.0);
    if (eval.embeddings.empty()) return div;
    std::vector<Eigen::VectorXd> column(M);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t m = 0; m < M; ++m) column[m] = eval.embeddings[m][i];
        GramMatrix g = gram(cfg.kernel, column);
        div[i] = det(g);
    }
    return div;
}

void apply_dvd_coefficients(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg,
                            const EvalResult& eval, const std::vector<double>& dhat,
                            double lambda_t, const PerturbationBlock& block) {
    const std::size_t k = static_cast<std::size_t>(cfg.sensings);
    std::vector<double> coeffs(k);
    for (std::size_t m = 0; m < population.size(); ++m) {
        const std::vector<double> rhat = normalize_scores(eval.rewards[m]);
        for (std::size_t i = 0; i < k; ++i)
            coeffs[i] = (1.0 - lambda_t) * rhat[i] + lambda_t * dhat[i];
        apply_update(population[m], block.g[m], coeffs, cfg.eta, cfg.sigma);
    }
}

} // namespace

Eigen::VectorXd vanilla_step(const Eigen::VectorXd& theta, double sigma, double eta, int sensings,
                             const std::function<double(const Eigen::VectorXd&)>& objective,
                             Rng& rng) {
    if (!(sigma > 0.0) || !(eta > 0.0) || sensings < 1)
        throw std::invalid_argument("vanilla_step: bad hyperparameters");
    Eigen::MatrixXd g(theta.size(), sensings);
    for (int i = 0; i < sensings; ++i) g.col(i) = rng.normal_vector(theta.size());
    std::vector<double> rewards(sensings);
    for (int i = 0; i < sensings; ++i) rewards[i] = objective(theta + sigma * g.col(i));
    Eigen::VectorXd out = theta;
    apply_update(out, g, normalize_scores(rewards), eta, sigma);
    return out;
}

StepStats dvd_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg, const Task& task,
                   const std::vector<Eigen::VectorXd>& anchors, const StateFilter& filter,
                   double lambda_t, const PerturbationBlock& block,
                   std::vector<Trajectory>* kept_trajectories,
                   std::vector<Eigen::VectorXd>* raw_merge) {
    cfg.validate();
    if (!(lambda_t >= 0.0 && lambda_t <= 1.0))
        throw std::invalid_argument("dvd_step: lambda must be in [0, 1]");
    const bool with_embeddings = !task.uses_anchors() || !anchors.empty();
    const EvalResult eval = evaluate_perturbed(population, cfg, task, anchors, filter, block,
                                               with_embeddings, kept_trajectories, raw_merge);
    StepStats stats;
    stats.column_diversity = column_determinants(eval, cfg);
    apply_dvd_coefficients(population, cfg, eval, normalize_scores(stats.column_diversity),
                           lambda_t, block);
    stats.per_agent_mean_reward = eval.agent_means;
    stats.best_reward = eval.best_sensing;
    return stats;
}

StepStats parallel_vanilla_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg,
                                const Task& task, const StateFilter& filter,
                                const PerturbationBlock& block,
                                std::vector<Trajectory>* kept_trajectories,
                                std::vector<Eigen::VectorXd>* raw_merge) {
    cfg.validate();
    const EvalResult eval = evaluate_perturbed(population, cfg, task, {}, filter, block,
                                               /*with_embeddings=*/false, kept_trajectories,
                                               raw_merge);
    apply_dvd_coefficients(population, cfg, eval, std::vector<double>(cfg.sensings, 0.0),
                           /*lambda_t=*/0.0, block);
    StepStats stats;
    stats.per_agent_mean_reward = eval.agent_means;
    stats.best_reward = eval.best_sensing;
    return stats;
}

StepStats nsr_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg, const Task& task,
                   const std::vector<Eigen::VectorXd>& anchors, const StateFilter& filter,
                   double lambda, const PerturbationBlock& block, std::size_t agent,
                   std::vector<Trajectory>* kept_trajectories,
                   std::vector<Eigen::VectorXd>* raw_merge) {
    cfg.validate();
    if (agent >= population.size()) throw std::invalid_argument("nsr_step: bad agent index");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("nsr_step: lambda must be in [0, 1]");
    const std::size_t M = population.size();
    const std::size_t k = static_cast<std::size_t>(cfg.sensings);
    const bool with_embeddings = (!task.uses_anchors() || !anchors.empty()) && M > 1;

    std::vector<Trajectory> trajectories(k);
    std::vector<Eigen::VectorXd> embeddings(with_embeddings ? k : 0);
    parallel_for(k, [&](std::size_t i) {
        const Eigen::VectorXd perturbed = population[agent] + cfg.sigma * block.g[agent].col(i);
        trajectories[i] = task.rollout(perturbed, filter);
        if (with_embeddings) embeddings[i] = task.embed(perturbed, anchors);
    });

    // The other agents do not move this iteration; their unperturbed
    // rollouts supply the logged rewards and the novelty reference set.
    std::vector<Trajectory> others(M);
    std::vector<Eigen::VectorXd> other_embeddings(with_embeddings ? M : 0);
    parallel_for(M, [&](std::size_t m) {
        if (m == agent) return;
        others[m] = task.rollout(population[m], filter);
        if (with_embeddings) other_embeddings[m] = task.embed(population[m], anchors);
    });

    StepStats stats;
    stats.per_agent_mean_reward.assign(M, 0.0);
    stats.best_reward = -std::numeric_limits<double>::infinity();

    std::vector<double> rewards(k), novelty_scores(k, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        rewards[i] = trajectories[i].total_reward;
        sum += rewards[i];
        stats.best_reward = std::max(stats.best_reward, rewards[i]);
        if (with_embeddings) {
            double dist = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                if (m != agent) dist += (embeddings[i] - other_embeddings[m]).norm();
            novelty_scores[i] = dist / static_cast<double>(M);
        }
    }
    stats.per_agent_mean_reward[agent] = sum / static_cast<double>(k);

    for (std::size_t m = 0; m < M; ++m) {
        if (m == agent) continue;
        stats.per_agent_mean_reward[m] = others[m].total_reward;
        stats.best_reward = std::max(stats.best_reward, others[m].total_reward);
    }

    const std::vector<double> rhat = normalize_scores(rewards);
    const std::vector<double> nhat = normalize_scores(novelty_scores);
    std::vector<double> coeffs(k);
    for (std::size_t i = 0; i < k; ++i)
        coeffs[i] = (1.0 - lambda) * rhat[i] + lambda * nhat[i];
    apply_update(population[agent], block.g[agent], coeffs, cfg.eta, cfg.sigma);

    if (raw_merge) {
        for (std::size_t i = 0; i < k; ++i)
            for (const auto& obs : trajectories[i].raw_observations) raw_merge->push_back(obs);
        for (std::size_t m = 0; m < M; ++m) {
            if (m == agent) continue;
            for (const auto& obs : others[m].raw_observations) raw_merge->push_back(obs);
        }
    }
    if (kept_trajectories) {
        for (std::size_t m = 0; m < M; ++m)
            kept_trajectories->push_back(m == agent ? trajectories[0] : others[m]);
    }
    return stats;
}

RunResult run(const EsConfig& cfg, const Task& task) {
    cfg.validate();
    const std::size_t M = static_cast<std::size_t>(cfg.population);

    Rng init_rng(derive_seed(cfg.seed, 0));
    Rng pert_rng(derive_seed(cfg.seed, 1));
    Rng anchor_rng(derive_seed(cfg.seed, 3));
    Rng agent_rng(derive_seed(cfg.seed, 4));
    const bool use_bandit = cfg.algo == Algo::DvdEs && !cfg.fixed_lambda;
    BanditState bandit({0.0, 0.5}, derive_seed(cfg.seed, 2));

    RunResult result;
    const Eigen::VectorXd theta0 = task.init_params(init_rng);
    result.population.assign(M, theta0);
    result.filter = StateFilter(task.obs_dim());
    StateBuffer buffer(10 * static_cast<std::size_t>(task.horizon()) * M);

    double prev_best = 0.0;
    bool have_prev = false;

    for (long long t = 0; t < cfg.iterations; ++t) {
        const auto tic = std::chrono::steady_clock::now();

        if (task.uses_anchors() && refresh_due(t, cfg.embedding) && !buffer.empty())
            result.anchors = select_anchors(buffer, cfg.embedding, anchor_rng);

        PerturbationBlock block = draw_perturbations(cfg.population, cfg.sensings,
                                                     task.param_dim(), pert_rng);
        // The vanilla baseline is M replicas of a single ES learner: agents
        // share one init and, absent any diversity term, nothing should
        // decorrelate them, so they share the sensing noise too.
        if (cfg.algo == Algo::Vanilla)
            for (std::size_t m = 1; m < M; ++m) block.g[m] = block.g[0];
        if (cfg.mirrored)
            for (auto& g : block.g)
                for (int i = cfg.sensings / 2; i < cfg.sensings; ++i)
                    g.col(i) = -g.col(i - cfg.sensings / 2);

        IterationRecord rec;
        rec.iteration = t;
        std::vector<Trajectory> kept;
        std::vector<Eigen::VectorXd> raw;
        StepStats stats;

        switch (cfg.algo) {
        case Algo::Vanilla: {
            rec.lambda_used = 0.0;
            stats = parallel_vanilla_step(result.population, cfg, task, result.filter, block,
                                          &kept, &raw);
            break;
        }
        case Algo::NsrEs: {
            rec.lambda_used = cfg.fixed_lambda.value_or(0.5);
            const std::size_t agent = static_cast<std::size_t>(agent_rng.integer(M));
            stats = nsr_step(result.population, cfg, task, result.anchors, result.filter,
                             rec.lambda_used, block, agent, &kept, &raw);
            break;
        }
        case Algo::DvdEs: {
            const bool with_embeddings = !task.uses_anchors() || !result.anchors.empty();
            const EvalResult eval = evaluate_perturbed(result.population, cfg, task,
                                                       result.anchors, result.filter, block,
                                                       with_embeddings, &kept, &raw);
            // Credit the arm chosen last iteration before sampling a new
            // one: its payoff only shows in this iteration's rewards.
            if (use_bandit) {
                if (have_prev) {
                    const int s = reward_signal(prev_best, eval.best_agent_mean);
                    bandit.update(*bandit.last_chosen(), s);
                    rec.bandit_signal = s;
                }
                rec.lambda_used = bandit.sample_lambda().second;
            } else {
                rec.lambda_used = *cfg.fixed_lambda;
            }
            stats.column_diversity = column_determinants(eval, cfg);
            apply_dvd_coefficients(result.population, cfg, eval,
                                   normalize_scores(stats.column_diversity), rec.lambda_used,
                                   block);
            stats.per_agent_mean_reward = eval.agent_means;
            stats.best_reward = eval.best_sensing;
            break;
        }
        }

        for (const auto& obs : raw) result.filter.observe(obs);
        for (const auto& traj : kept) record_states(buffer, traj);

        double best_mean = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < M; ++m)
            best_mean = std::max(best_mean, stats.per_agent_mean_reward[m]);
        prev_best = best_mean;
        have_prev = true;

        if (!task.uses_anchors() || !result.anchors.empty()) {
            std::vector<Eigen::VectorXd> embeddings;
            embeddings.reserve(M);
            for (const auto& theta : result.population)
                embeddings.push_back(task.embed(theta, result.anchors));
            rec.diversity = population_diversity(embeddings, cfg.kernel);
        }

        rec.per_agent_mean_reward = stats.per_agent_mean_reward;
        rec.best_reward = stats.best_reward;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
        result.records.push_back(std::move(rec));
    }
    return result;
}

} // namespace dvd
