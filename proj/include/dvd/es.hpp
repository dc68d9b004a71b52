#ifndef DVD_ES_HPP
#define DVD_ES_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dvd/bandit.hpp"
#include "dvd/embeddings.hpp"
#include "dvd/envs.hpp"
#include "dvd/kernels.hpp"
#include "dvd/rng.hpp"

namespace dvd {

enum class Algo { Vanilla, NsrEs, DvdEs };

std::string algo_name(Algo a);
Algo parse_algo(const std::string& name);

struct EsConfig {
    double sigma = 0.1;
    double eta = 0.05;
    int sensings = 100;     // k
    int population = 5;     // M
    long long iterations = 200;
    Algo algo = Algo::DvdEs;
    std::optional<double> fixed_lambda; // disables the bandit when set
    KernelSpec kernel;
    EmbeddingConfig embedding;
    std::uint64_t seed = 0;
    bool mirrored = false; // antithetic sampling extension, off by default

    void validate() const;
};

/// All M*k Gaussian perturbations of one iteration, drawn up-front from
/// the seeded generator so results are independent of worker count.
struct PerturbationBlock {
    std::vector<Eigen::MatrixXd> g; // g[m] is d x k; column i is g_i^m
};

PerturbationBlock draw_perturbations(int population, int sensings, int dim, Rng& rng);

struct IterationRecord {
    long long iteration = 0;
    std::vector<double> per_agent_mean_reward;
    double best_reward = 0.0; // max over all sensings this iteration
    double lambda_used = 0.0;
    double diversity = 0.0; // Div of the post-update population
    std::optional<int> bandit_signal;
    double wall_seconds = 0.0;
};

/// z-scores; all zeros when the spread is degenerate.
std::vector<double> normalize_scores(const std::vector<double>& scores);

/// One vanilla ES step on a blackbox objective.
Eigen::VectorXd vanilla_step(const Eigen::VectorXd& theta, double sigma, double eta, int sensings,
                             const std::function<double(const Eigen::VectorXd&)>& objective,
                             Rng& rng);

struct StepStats {
    std::vector<double> per_agent_mean_reward;
    double best_reward = 0.0;
    std::vector<double> column_diversity; // DvD only: Div_t(i) per column
};

/// Joint DvD update: every agent moves simultaneously, mixing its
/// z-scored sensing rewards with the z-scored per-column determinant of
/// the jointly perturbed population.
StepStats dvd_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg, const Task& task,
                   const std::vector<Eigen::VectorXd>& anchors, const StateFilter& filter,
                   double lambda_t, const PerturbationBlock& block,
                   std::vector<Trajectory>* kept_trajectories = nullptr,
                   std::vector<Eigen::VectorXd>* raw_merge = nullptr);

/// M independent vanilla updates sharing the perturbation block. Equals
/// dvd_step with lambda 0, bitwise.
StepStats parallel_vanilla_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg,
                                const Task& task, const StateFilter& filter,
                                const PerturbationBlock& block,
                                std::vector<Trajectory>* kept_trajectories = nullptr,
                                std::vector<Eigen::VectorXd>* raw_merge = nullptr);

/// NSR-ES: one uniformly sampled agent moves, mixing z-scored rewards
/// with z-scored mean-distance novelty against the other agents.
StepStats nsr_step(std::vector<Eigen::VectorXd>& population, const EsConfig& cfg, const Task& task,
                   const std::vector<Eigen::VectorXd>& anchors, const StateFilter& filter,
                   double lambda, const PerturbationBlock& block, std::size_t agent,
                   std::vector<Trajectory>* kept_trajectories = nullptr,
                   std::vector<Eigen::VectorXd>* raw_merge = nullptr);

struct RunResult {
    std::vector<IterationRecord> records;
    std::vector<Eigen::VectorXd> population;
    std::vector<Eigen::VectorXd> anchors;
    StateFilter filter;
};

/// Full training loop: anchor refresh, lambda selection (Thompson
/// sampling unless fixed), algorithm dispatch, filter/buffer bookkeeping
/// and per-iteration records.
RunResult run(const EsConfig& cfg, const Task& task);

} // namespace dvd

#endif
