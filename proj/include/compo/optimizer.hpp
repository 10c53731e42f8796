#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace compo {

struct OptConfig {
  int population_size = 16;             // lambda
  int parent_count = 4;                 // mu, weighted recombination pool
  double initial_step = 0.5;            // sigma_0
  int max_epochs = 20000;               // one epoch = one generation
  double target_cost = -std::numeric_limits<double>::infinity();
  uint64_t rng_seed = 0;

  void validate() const;
};

struct OptResult {
  std::vector<double> best_genotype;
  double best_cost = std::numeric_limits<double>::infinity();
  int epochs_used = 0;
  std::vector<std::pair<int, double>> cost_history;  // (epoch, best-so-far)
};

// Candidate-generation strategy. minimize() owns the loop: it asks the
// sampler for a population, evaluates it (possibly in parallel, reduced in
// candidate order), then reports ranked results back. Model-based samplers
// plug in here; the shipped default is a Gaussian ES.
class SamplerStrategy {
 public:
  virtual ~SamplerStrategy() = default;
  virtual void init(int dim, const OptConfig& cfg) = 0;
  // Fills population with cfg.population_size candidate vectors of length dim.
  virtual void sample(std::mt19937_64& rng, std::vector<std::vector<double>>& population) = 0;
  // order[r] is the candidate index with rank r (best first); costs are the
  // raw per-candidate costs (infinities for discarded candidates).
  virtual void update(const std::vector<std::vector<double>>& population,
                      std::span<const double> costs, std::span<const int> order) = 0;
};

// mu/mu-weighted Gaussian ES. Mean starts at zero, moves to the weighted
// recombination of the top-mu candidates with rank weights proportional to
// log(mu+1) - log(rank). Candidates come in antithetic pairs (mean + s,
// mean - s), which halves sampling noise on drifting plateaus. Per-dimension
// step sizes follow the 1/5th-success rule per generation: a candidate counts
// as a success when it beats the previous generation's recombined-parent cost;
// fraction > 1/5 multiplies sigma by 1.1, fraction < 1/5 by 1/1.1, exactly
// 1/5 leaves it unchanged. Sigma floor 1e-12.
//
// When target_cost is finite and positive, an attempt whose best cost sits
// above 2x the target and has not improved by 5% in 1000 generations is
// treated as trapped in a bad basin: mean and sigma reinitialize and search
// restarts on the same RNG stream. minimize() keeps the global best across
// restarts, so cost_history stays non-increasing.
class GaussianEsSampler : public SamplerStrategy {
 public:
  void init(int dim, const OptConfig& cfg) override;
  void sample(std::mt19937_64& rng, std::vector<std::vector<double>>& population) override;
  void update(const std::vector<std::vector<double>>& population, std::span<const double> costs,
              std::span<const int> order) override;

  std::span<const double> mean() const { return mean_; }
  std::span<const double> step_sizes() const { return sigma_; }

 private:
  void restart();

  int dim_ = 0;
  int mu_ = 0;
  double sigma0_ = 0.5;
  double target_cost_ = -std::numeric_limits<double>::infinity();
  std::vector<double> mean_;
  std::vector<double> sigma_;
  std::vector<double> rank_weights_;
  double parent_cost_ = std::numeric_limits<double>::infinity();
  double attempt_best_ = std::numeric_limits<double>::infinity();
  double milestone_ = std::numeric_limits<double>::infinity();
  int stalled_gens_ = 0;
};

// Normalized recombination weights, w_r proportional to log(mu+1) - log(r).
std::vector<double> recombination_weights(int mu);

using CostFn = std::function<double(std::span<const double>)>;
using GenerationHook = std::function<void(int epoch)>;

// Minimizes cost over R^dim. Stops when the best cost drops to target_cost or
// the epoch budget is spent. Candidates are sampled from a single RNG stream
// and evaluated with deterministic reduction order, so results are identical
// serial or parallel. Non-finite costs are replaced by +infinity; a whole
// generation of them is an error. The hook, when set, runs before each
// generation's evaluations (episode-seed rotation for stochastic tasks).
OptResult minimize(const CostFn& cost, int dim, const OptConfig& cfg, SamplerStrategy& sampler,
                   const GenerationHook& hook = {});

OptResult minimize(const CostFn& cost, int dim, const OptConfig& cfg);  // default sampler

}  // namespace compo
