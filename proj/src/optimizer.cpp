#include "compo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "compo/common.hpp"

namespace compo {

void OptConfig::validate() const {
  if (population_size < 1)
    throw ValidationError("OptConfig: population_size must be >= 1, got " +
                          std::to_string(population_size));
  if (parent_count < 1 || parent_count > population_size)
    throw ValidationError("OptConfig: parent_count must satisfy 1 <= mu <= lambda, got mu=" +
                          std::to_string(parent_count) + ", lambda=" +
                          std::to_string(population_size));
  if (!(initial_step > 0.0))
    throw ValidationError("OptConfig: initial_step must be positive");
  if (max_epochs < 1)
    throw ValidationError("OptConfig: max_epochs must be >= 1, got " +
                          std::to_string(max_epochs));
}

std::vector<double> recombination_weights(int mu) {
  std::vector<double> w(mu);
  double sum = 0.0;
  for (int r = 1; r <= mu; ++r) {
    w[r - 1] = std::log(mu + 1.0) - std::log(static_cast<double>(r));
    sum += w[r - 1];
  }
  for (double& x : w) x /= sum;
  return w;
}

namespace {
constexpr int kStallGenerations = 1000;     // restart after this many gens without...
constexpr double kStallImprovement = 0.05;  // ...a 5% relative improvement
constexpr double kRestartBar = 2.0;  // never restart within this multiple of target_cost
}  // namespace

void GaussianEsSampler::init(int dim, const OptConfig& cfg) {
  dim_ = dim;
  mu_ = cfg.parent_count;
  sigma0_ = cfg.initial_step;
  target_cost_ = cfg.target_cost;
  rank_weights_ = recombination_weights(mu_);
  restart();
}

void GaussianEsSampler::restart() {
  mean_.assign(dim_, 0.0);
  sigma_.assign(dim_, sigma0_);
  parent_cost_ = std::numeric_limits<double>::infinity();
  attempt_best_ = std::numeric_limits<double>::infinity();
  milestone_ = std::numeric_limits<double>::infinity();
  stalled_gens_ = 0;
}

void GaussianEsSampler::sample(std::mt19937_64& rng,
                               std::vector<std::vector<double>>& population) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t i = 0; i < population.size(); ++i) {
    auto& candidate = population[i];
    candidate.resize(mean_.size());
    if (i % 2 == 1) {
      const auto& twin = population[i - 1];
      for (size_t d = 0; d < mean_.size(); ++d) candidate[d] = 2.0 * mean_[d] - twin[d];
    } else {
      for (size_t d = 0; d < mean_.size(); ++d)
        candidate[d] = mean_[d] + sigma_[d] * normal(rng);
    }
  }
}

void GaussianEsSampler::update(const std::vector<std::vector<double>>& population,
                               std::span<const double> costs, std::span<const int> order) {
  const int lambda = static_cast<int>(population.size());

  int successes = 0;
  for (double c : costs)
    if (c < parent_cost_) ++successes;
  const double fraction = static_cast<double>(successes) / lambda;
  const double kTargetFraction = 0.2;
  if (fraction > kTargetFraction) {
    for (double& s : sigma_) s = std::max(s * 1.1, 1e-12);
  } else if (fraction < kTargetFraction) {
    for (double& s : sigma_) s = std::max(s / 1.1, 1e-12);
  }

  std::fill(mean_.begin(), mean_.end(), 0.0);
  parent_cost_ = 0.0;
  for (int r = 0; r < mu_; ++r) {
    const auto& parent = population[order[r]];
    const double w = rank_weights_[r];
    parent_cost_ += w * costs[order[r]];
    for (size_t d = 0; d < mean_.size(); ++d) mean_[d] += w * parent[d];
  }

  attempt_best_ = std::min(attempt_best_, costs[order[0]]);
  if (attempt_best_ < milestone_ * (1.0 - kStallImprovement)) {
    milestone_ = attempt_best_;
    stalled_gens_ = 0;
  } else if (++stalled_gens_ >= kStallGenerations && std::isfinite(target_cost_) &&
             target_cost_ > 0.0 && attempt_best_ > kRestartBar * target_cost_) {
    restart();
  }
}

OptResult minimize(const CostFn& cost, int dim, const OptConfig& cfg, SamplerStrategy& sampler,
                   const GenerationHook& hook) {
  if (dim < 1) throw ValidationError("minimize: dim must be >= 1, got " + std::to_string(dim));
  cfg.validate();

  sampler.init(dim, cfg);
  auto rng = make_rng(cfg.rng_seed);
  const int lambda = cfg.population_size;
  const int workers = worker_threads();

  std::vector<std::vector<double>> population(lambda);
  std::vector<double> costs(lambda);
  std::vector<int> order(lambda);

  OptResult result;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (hook) hook(epoch);
    sampler.sample(rng, population);

    parallel_for_indexed(lambda, workers, [&](int i) {
      const double c = cost(population[i]);
      costs[i] = std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    });

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return costs[a] < costs[b]; });
    if (!std::isfinite(costs[order[0]]))
      throw ValidationError("minimize: every candidate in epoch " + std::to_string(epoch) +
                            " produced a non-finite cost");

    sampler.update(population, costs, order);

    if (costs[order[0]] < result.best_cost) {
      result.best_cost = costs[order[0]];
      result.best_genotype = population[order[0]];
    }
    result.epochs_used = epoch;
    result.cost_history.emplace_back(epoch, result.best_cost);
    if (result.best_cost <= cfg.target_cost) break;
  }
  return result;
}

OptResult minimize(const CostFn& cost, int dim, const OptConfig& cfg) {
  GaussianEsSampler sampler;
  return minimize(cost, dim, cfg, sampler);
}

}  // namespace compo
