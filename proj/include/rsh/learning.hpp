#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsh/core.hpp"

namespace rsh {

/// Pairwise error of one hash function: rho for a split similar pair,
/// lambda for a merged dissimilar pair, 0 otherwise.
double pair_error(Symbol hi, Symbol hj, int s, double rho, double lambda);

/// Maximiser of m_kl = yi[k] + yj[l] + (k == l ? lambda (1 - s) : rho s).
struct AdjustedArgmax {
  std::size_t gi_star = 0;
  std::size_t gj_star = 0;
  double value = 0.0;
};

/// O(K^2) scan; the lexicographically smallest (k, l) wins ties.
AdjustedArgmax loss_adjusted_inference(std::span<const double> yi, std::span<const double> yj,
                                       int s, double rho, double lambda);

/// Piecewise-linear upper bound on pair_error for one pair:
/// max_{g_i, g_j}[e + g_i.W x_i + g_j.W x_j] - h_i.W x_i - h_j.W x_j.
double surrogate_pair(const ProjectionMatrix& W, std::span<const double> xi,
                      std::span<const double> xj, int s, double rho, double lambda);

/// Negative subgradient of surrogate_pair w.r.t. W:
/// (h_i - g_i*) x_i^T + (h_j - g_j*) x_j^T. Zero when codes and maximisers agree.
Matrix pair_descent_direction(const ProjectionMatrix& W, std::span<const double> xi,
                              std::span<const double> xj, int s, double rho, double lambda);

/// One online step: W + eta * weight * pair_descent_direction(...).
ProjectionMatrix pair_gradient_step(const ProjectionMatrix& W, std::span<const double> xi,
                                    std::span<const double> xj, int s, const Hyperparams& hyper,
                                    double weight);

struct ObjectiveValue {
  double surrogate = 0.0;  ///< Omega(W): sum of surrogate_pair
  double empirical = 0.0;  ///< E(W): sum of pair_error of the actual codes
};

/// Sums over all pairs. With `pair_weights` non-empty, each pair's terms are
/// multiplied by its weight.
ObjectiveValue objective(const Dataset& data, const PairSet& pairs, const ProjectionMatrix& W,
                         const Hyperparams& hyper, std::span<const double> pair_weights = {});

/// Objective values before training (entry 0) and after each epoch.
struct BitTrace {
  std::vector<double> surrogate;
  std::vector<double> empirical;

  std::size_t epochs_run() const { return surrogate.empty() ? 0 : surrogate.size() - 1; }
};

struct BitResult {
  ProjectionMatrix W;
  BitTrace trace;
};

/// Trains one hash function from a Gaussian start seeded with `bit_seed`.
/// Epoch t uses step eta / (1 + t) and a fresh shuffle of the pair order;
/// training stops after hyper.epochs or once the relative change of the
/// (weighted) objective between epochs drops below hyper.tol.
BitResult train_bit(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper,
                    std::uint64_t bit_seed, std::span<const double> pair_weights = {});

/// Per-bit AdaBoost bookkeeping recorded by train_srsh.
struct BoostRecord {
  double epsilon = 0.0;    ///< clamped weighted error
  double theta = 0.0;      ///< ln((1 - epsilon) / epsilon)
  double alpha_sum = 0.0;  ///< sum of pair weights after the update
  double alpha_min = 0.0;  ///< smallest pair weight after the update
};

struct TrainingResult {
  HashModel model;
  std::vector<BitTrace> traces;
  std::vector<BoostRecord> boosting;  ///< empty for train_rsh
};

/// Bit l is trained independently with child_seed(hyper.seed, l); bits run
/// concurrently.
TrainingResult train_rsh(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper);

/// Sequential training with AdaBoost pair reweighting; the model carries theta.
TrainingResult train_srsh(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper);

/// pair_error scaled by max(rho, lambda) into [0, 1] (0 when both are 0).
double normalized_pair_error(Symbol hi, Symbol hj, int s, double rho, double lambda);

/// ln((1 - eps) / eps) after clamping eps into [eps_min, 1 - eps_min].
double boost_theta(double epsilon, double eps_min);

/// alpha_ij *= exp(theta * err_ij), then rescale so the total is unchanged.
void reweight_pairs(std::span<double> alpha, std::span<const double> errors, double theta);

}  // namespace rsh
