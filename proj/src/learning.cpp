#include "rsh/learning.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <string>

#include "rsh/hashers.hpp"
#include "rsh/kernels.hpp"

namespace rsh {

namespace {

void check_pair_dims(const ProjectionMatrix& W, std::span<const double> xi,
                     std::span<const double> xj) {
  require(xi.size() == W.dim() && xj.size() == W.dim(), ErrorKind::DimensionMismatch,
          "pair vectors must have dimension " + std::to_string(W.dim()));
}

// Projections and codes for one pair; reused by every per-pair routine.
struct PairState {
  std::vector<double> yi;
  std::vector<double> yj;
  std::size_t hi = 0;
  std::size_t hj = 0;
  AdjustedArgmax adjusted;

  explicit PairState(std::size_t K) : yi(K), yj(K) {}

  void evaluate(const Matrix& W, std::span<const double> xi, std::span<const double> xj, int s,
                double rho, double lambda) {
    project(W, xi, yi);
    project(W, xj, yj);
    hi = first_argmax(yi);
    hj = first_argmax(yj);
    adjusted = loss_adjusted_inference(yi, yj, s, rho, lambda);
  }

  double surrogate() const { return adjusted.value - yi[hi] - yj[hj]; }

  bool at_optimum() const { return hi == adjusted.gi_star && hj == adjusted.gj_star; }
};

// W += step * [(h_i - g_i*) x_i^T + (h_j - g_j*) x_j^T]
void add_descent(Matrix& W, const PairState& st, std::span<const double> xi,
                 std::span<const double> xj, double step) {
  if (st.at_optimum()) return;
  const auto d = static_cast<std::size_t>(W.cols());
  auto axpy = [&](std::size_t row, std::span<const double> x, double a) {
    double* w = W.data() + row * d;
    for (std::size_t c = 0; c < d; ++c) w[c] += a * x[c];
  };
  if (st.hi != st.adjusted.gi_star) {
    axpy(st.hi, xi, step);
    axpy(st.adjusted.gi_star, xi, -step);
  }
  if (st.hj != st.adjusted.gj_star) {
    axpy(st.hj, xj, step);
    axpy(st.adjusted.gj_star, xj, -step);
  }
}

void check_training_inputs(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper) {
  hyper.validate();
  require(!pairs.empty(), ErrorKind::InvalidArgument, "training requires a non-empty PairSet");
  require(pairs.row_count() == data.size(), ErrorKind::DimensionMismatch,
          "PairSet was built for " + std::to_string(pairs.row_count()) + " rows, dataset has " +
              std::to_string(data.size()));
}

double relative_change(double previous, double current) {
  const double scale = std::max(std::abs(previous), 1e-12);
  return std::abs(previous - current) / scale;
}

}  // namespace

double pair_error(Symbol hi, Symbol hj, int s, double rho, double lambda) {
  const bool differ = hi != hj;
  return s == 1 ? (differ ? rho : 0.0) : (differ ? 0.0 : lambda);
}

AdjustedArgmax loss_adjusted_inference(std::span<const double> yi, std::span<const double> yj,
                                       int s, double rho, double lambda) {
  require(yi.size() == yj.size() && !yi.empty(), ErrorKind::DimensionMismatch,
          "loss_adjusted_inference: score vectors must be non-empty and of equal length");
  const double same_bonus = lambda * (1 - s);
  const double split_bonus = rho * s;
  AdjustedArgmax best{0, 0, yi[0] + yj[0] + same_bonus};
  for (std::size_t k = 0; k < yi.size(); ++k) {
    for (std::size_t l = 0; l < yj.size(); ++l) {
      const double m = yi[k] + yj[l] + (k == l ? same_bonus : split_bonus);
      if (m > best.value) best = {k, l, m};
    }
  }
  return best;
}

double surrogate_pair(const ProjectionMatrix& W, std::span<const double> xi,
                      std::span<const double> xj, int s, double rho, double lambda) {
  check_pair_dims(W, xi, xj);
  PairState st(W.subspaces());
  st.evaluate(W.rows(), xi, xj, s, rho, lambda);
  return st.surrogate();
}

Matrix pair_descent_direction(const ProjectionMatrix& W, std::span<const double> xi,
                              std::span<const double> xj, int s, double rho, double lambda) {
  check_pair_dims(W, xi, xj);
  PairState st(W.subspaces());
  st.evaluate(W.rows(), xi, xj, s, rho, lambda);
  Matrix dir = Matrix::Zero(W.rows().rows(), W.rows().cols());
  add_descent(dir, st, xi, xj, 1.0);
  return dir;
}

ProjectionMatrix pair_gradient_step(const ProjectionMatrix& W, std::span<const double> xi,
                                    std::span<const double> xj, int s, const Hyperparams& hyper,
                                    double weight) {
  require(weight > 0.0, ErrorKind::InvalidArgument, "pair_gradient_step: weight must be > 0");
  check_pair_dims(W, xi, xj);
  PairState st(W.subspaces());
  st.evaluate(W.rows(), xi, xj, s, hyper.rho, hyper.lambda);
  Matrix next = W.rows();
  add_descent(next, st, xi, xj, hyper.eta * weight);
  return ProjectionMatrix(std::move(next));
}

ObjectiveValue objective(const Dataset& data, const PairSet& pairs, const ProjectionMatrix& W,
                         const Hyperparams& hyper, std::span<const double> pair_weights) {
  require(data.dim() == W.dim(), ErrorKind::DimensionMismatch,
          "objective: dataset and projection dimensions differ");
  require(pair_weights.empty() || pair_weights.size() == pairs.size(), ErrorKind::InvalidArgument,
          "objective: one weight per pair required");
  require(pairs.empty() || pairs.row_count() <= data.size(), ErrorKind::DimensionMismatch,
          "objective: PairSet references rows outside the dataset");
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
  std::vector<double> surrogate(pairs.size());
  std::vector<double> empirical(pairs.size());
#pragma omp parallel
  {
    PairState st(W.subspaces());
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const Pair& p = pairs[static_cast<std::size_t>(k)];
      const auto xi = row_span(data.features(), p.i);
      const auto xj = row_span(data.features(), p.j);
      st.evaluate(W.rows(), xi, xj, p.s, hyper.rho, hyper.lambda);
      const double w = pair_weights.empty() ? 1.0 : pair_weights[static_cast<std::size_t>(k)];
      surrogate[static_cast<std::size_t>(k)] = w * st.surrogate();
      empirical[static_cast<std::size_t>(k)] =
          w * pair_error(static_cast<Symbol>(st.hi), static_cast<Symbol>(st.hj), p.s, hyper.rho,
                         hyper.lambda);
    }
  }
  // Summed in pair order so the value does not depend on the thread count.
  ObjectiveValue out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out.surrogate += surrogate[k];
    out.empirical += empirical[k];
  }
  return out;
}

BitResult train_bit(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper,
                    std::uint64_t bit_seed, std::span<const double> pair_weights) {
  check_training_inputs(data, pairs, hyper);
  require(pair_weights.empty() || pair_weights.size() == pairs.size(), ErrorKind::InvalidArgument,
          "train_bit: one weight per pair required");

  Rng rng(bit_seed);
  Matrix W = init_projection(hyper.K, data.dim(), rng).rows();

  BitTrace trace;
  auto record = [&](const Matrix& m) {
    const auto v = objective(data, pairs, ProjectionMatrix(m), hyper, pair_weights);
    trace.surrogate.push_back(v.surrogate);
    trace.empirical.push_back(v.empirical);
    return v.surrogate;
  };
  double previous = record(W);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  PairState st(hyper.K);
  const Matrix& X = data.features();

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    const double step = hyper.eta / (1.0 + static_cast<double>(epoch));
    for (std::size_t k : order) {
      const Pair& p = pairs[k];
      const auto xi = row_span(X, p.i);
      const auto xj = row_span(X, p.j);
      st.evaluate(W, xi, xj, p.s, hyper.rho, hyper.lambda);
      const double w = pair_weights.empty() ? 1.0 : pair_weights[k];
      add_descent(W, st, xi, xj, step * w);
    }
    const double current = record(W);
    if (relative_change(previous, current) < hyper.tol) break;
    previous = current;
  }
  return {ProjectionMatrix(std::move(W)), std::move(trace)};
}

TrainingResult train_rsh(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper) {
  check_training_inputs(data, pairs, hyper);
  const auto L = static_cast<std::ptrdiff_t>(hyper.L);
  std::vector<std::optional<BitResult>> bits(hyper.L);
  std::vector<std::exception_ptr> errors(hyper.L);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t l = 0; l < L; ++l) {
    const auto bit = static_cast<std::size_t>(l);
    try {
      bits[bit] = train_bit(data, pairs, hyper, child_seed(hyper.seed, bit));
    } catch (...) {
      errors[bit] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ProjectionMatrix> projections;
  std::vector<BitTrace> traces;
  for (auto& b : bits) {
    projections.push_back(std::move(b->W));
    traces.push_back(std::move(b->trace));
  }
  return {HashModel(std::move(projections), std::nullopt, hyper), std::move(traces), {}};
}

double normalized_pair_error(Symbol hi, Symbol hj, int s, double rho, double lambda) {
  const double scale = std::max(rho, lambda);
  if (scale <= 0.0) return 0.0;
  return pair_error(hi, hj, s, rho, lambda) / scale;
}

double boost_theta(double epsilon, double eps_min) {
  const double eps = std::clamp(epsilon, eps_min, 1.0 - eps_min);
  return std::log((1.0 - eps) / eps);
}

void reweight_pairs(std::span<double> alpha, std::span<const double> errors, double theta) {
  require(alpha.size() == errors.size(), ErrorKind::InvalidArgument,
          "reweight_pairs: one error per weight required");
  double before = 0.0;
  for (double a : alpha) before += a;
  double after = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    alpha[k] *= std::exp(theta * errors[k]);
    after += alpha[k];
  }
  const double scale = before / after;
  for (double& a : alpha) a *= scale;
}

TrainingResult train_srsh(const Dataset& data, const PairSet& pairs, const Hyperparams& hyper) {
  check_training_inputs(data, pairs, hyper);
  const std::size_t P = pairs.size();
  std::vector<double> alpha(P, 1.0);
  std::vector<double> errors(P);
  std::vector<ProjectionMatrix> projections;
  std::vector<double> thetas;
  std::vector<BitTrace> traces;
  std::vector<BoostRecord> records;

  for (std::size_t l = 0; l < hyper.L; ++l) {
    BitResult bit = train_bit(data, pairs, hyper, child_seed(hyper.seed, l), alpha);

    const auto codes = kernels::omp::encode_rsh(data.features(), std::span(&bit.W, 1));
    const auto n = static_cast<std::ptrdiff_t>(P);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const Pair& p = pairs[static_cast<std::size_t>(k)];
      errors[static_cast<std::size_t>(k)] = normalized_pair_error(
          codes[p.i][0], codes[p.j][0], p.s, hyper.rho, hyper.lambda);
    }
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
      weighted += alpha[k] * errors[k];
      total += alpha[k];
    }
    BoostRecord rec;
    rec.epsilon = std::clamp(weighted / total, hyper.eps_min, 1.0 - hyper.eps_min);
    rec.theta = boost_theta(rec.epsilon, hyper.eps_min);
    reweight_pairs(alpha, errors, rec.theta);
    rec.alpha_sum = 0.0;
    for (double a : alpha) rec.alpha_sum += a;
    rec.alpha_min = *std::min_element(alpha.begin(), alpha.end());

    projections.push_back(std::move(bit.W));
    thetas.push_back(rec.theta);
    traces.push_back(std::move(bit.trace));
    records.push_back(rec);
  }
  return {HashModel(std::move(projections), std::move(thetas), hyper), std::move(traces),
          std::move(records)};
}

}  // namespace rsh
