#pragma once

#include "fate421/rational.hpp"
#include "fate421/round_rules.hpp"
#include "fate421/strategy.hpp"
#include "fate421/utility.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fate421 {

/// Chapman-Kolmogorov kernel of a strategy, restricted to the states the
/// strategy reaches. sigma(j) maps layer j onto layer j + 1; from the last
/// layer on, the kernel is the identity.
template <typename Scalar>
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(std::vector<std::vector<Combination>> states, std::vector<Matrix<Scalar>> sigma)
      : states_(std::move(states)), sigma_(std::move(sigma)) {}

  int last_layer() const noexcept { return static_cast<int>(states_.size()) - 1; }
  const std::vector<Combination>& states(int j) const { return states_.at(static_cast<std::size_t>(clamp(j))); }

  /// Row index of `state` in layer j, or -1.
  int index(int j, const Combination& state) const {
    const auto& s = states(j);
    auto it = std::lower_bound(s.begin(), s.end(), state);
    return it != s.end() && *it == state ? static_cast<int>(it - s.begin()) : -1;
  }

  Matrix<Scalar> sigma(int j) const {
    if (j >= last_layer()) {
      const auto n = static_cast<Eigen::Index>(states_.back().size());
      return Matrix<Scalar>::Identity(n, n);
    }
    return sigma_.at(static_cast<std::size_t>(j));
  }

  template <typename Other>
  TransitionKernel<Other> cast() const {
    std::vector<Matrix<Other>> out;
    out.reserve(sigma_.size());
    for (const auto& m : sigma_) out.push_back(m.unaryExpr([](const Scalar& x) { return convert<Other>(x); }));
    return TransitionKernel<Other>(states_, std::move(out));
  }

 private:
  template <typename Other>
  static Other convert(const Scalar& x) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
      return scalar_cast<Other>(x);
    } else {
      return static_cast<Other>(x);
    }
  }
  int clamp(int j) const { return std::min(j, last_layer()); }

  std::vector<std::vector<Combination>> states_;
  std::vector<Matrix<Scalar>> sigma_;
};

/// Exact kernel; throws StrategyHole at a reached (state, event) without a
/// decision.
TransitionKernel<Rational> exact_transition_matrix(const Strategy& strategy, const FateGraph& graph);

template <typename Scalar = Rational>
TransitionKernel<Scalar> transition_matrix(const Strategy& strategy, const FateGraph& graph) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return exact_transition_matrix(strategy, graph);
  } else {
    return exact_transition_matrix(strategy, graph).template cast<Scalar>();
  }
}

/// Utility judged at the last layer, over the kernel's last-layer states.
template <typename Scalar>
Vector<Scalar> judged_utility(const TransitionKernel<Scalar>& kernel, const UtilitySpec& utility) {
  const int last = kernel.last_layer();
  const auto& states = kernel.states(last);
  Vector<Scalar> u(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i)
    u(static_cast<Eigen::Index>(i)) = scalar_cast<Scalar>(utility(last, states[i]).value());
  return u;
}

/// Expected utilities u_j over every layer: u_J judged, u_j = sigma_j u_{j+1}.
template <typename Scalar>
std::vector<Vector<Scalar>> kolmogorov_sweep(const TransitionKernel<Scalar>& kernel, const UtilitySpec& utility) {
  const int last = kernel.last_layer();
  std::vector<Vector<Scalar>> u(static_cast<std::size_t>(last) + 1);
  u.back() = judged_utility(kernel, utility);
  for (int j = last - 1; j >= 0; --j)
    u[static_cast<std::size_t>(j)] = kernel.sigma(j) * u[static_cast<std::size_t>(j) + 1];
  return u;
}

/// u_0(d_0): expected utility of the strategy.
template <typename Scalar = Rational>
Scalar kolmogorov_expectation(const Strategy& strategy, const UtilitySpec& utility, const FateGraph& graph) {
  return kolmogorov_sweep(transition_matrix<Scalar>(strategy, graph), utility).front()(0);
}

template <typename Scalar>
struct DensitySequence {
  TransitionKernel<Scalar> kernel;
  /// rho[j] over kernel.states(j)
  std::vector<Vector<Scalar>> rho;

  /// rho_j(state); stationary beyond the last layer, 0 off the support.
  Scalar at(int j, const Combination& state) const {
    const int k = std::min(j, kernel.last_layer());
    const int i = kernel.index(k, state);
    return i < 0 ? Scalar(0) : rho[static_cast<std::size_t>(k)](i);
  }
};

/// rho_0 = point mass at the origin, rho_{j+1} = sigma_j^T rho_j.
template <typename Scalar>
DensitySequence<Scalar> density_sweep(TransitionKernel<Scalar> kernel) {
  DensitySequence<Scalar> out{std::move(kernel), {}};
  const int last = out.kernel.last_layer();
  out.rho.resize(static_cast<std::size_t>(last) + 1);
  out.rho[0] = Vector<Scalar>::Zero(static_cast<Eigen::Index>(out.kernel.states(0).size()));
  out.rho[0](0) = Scalar(1);
  for (int j = 0; j < last; ++j)
    out.rho[static_cast<std::size_t>(j) + 1] = out.kernel.sigma(j).transpose() * out.rho[static_cast<std::size_t>(j)];
  return out;
}

template <typename Scalar = Rational>
DensitySequence<Scalar> fokker_planck_density(const Strategy& strategy, const FateGraph& graph) {
  return density_sweep(transition_matrix<Scalar>(strategy, graph));
}

struct DualityEntry {
  int time = 0;
  Rational inner_product;
  bool equal = false;
};

struct DualityReport {
  Rational initial_value;
  std::vector<DualityEntry> entries;
  bool passed() const;
  /// Times at which the conservation law fails.
  std::vector<int> offending() const;
};

/// <u_j, rho_j> = u_0(d_0) for j = 0..J + 1 (one step past the last layer
/// checks stationarity too).
DualityReport duality_check(const Strategy& strategy, const UtilitySpec& utility, const FateGraph& graph);

struct MonteCarloResult {
  double mean = 0;
  double standard_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Seeded simulation of the strategy. Each chunk of 4096 samples runs its
/// own std::mt19937_64 seeded by splitmix64 of (seed, chunk index); faces
/// are drawn by rejection from the 64-bit output; chunk statistics are
/// combined in chunk order, so the result does not depend on `threads`.
MonteCarloResult monte_carlo(const Strategy& strategy, const UtilitySpec& utility, const RoundConfig& config,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

/// Law of the judged state when the strategy plays on from (time, state).
std::map<Combination, Rational> result_law(const Strategy& strategy, const FateGraph& graph, int time,
                                           const Combination& state);

/// Expected judged utility from (time, state) under the strategy.
Rational expected_value_from(const Strategy& strategy, const UtilitySpec& utility, const FateGraph& graph, int time,
                             const Combination& state);

/// policy_value / optimal_value; throws PreconditionError on a zero optimum.
Rational optimality_ratio(const Rational& policy_value, const Rational& optimal_value);

}  // namespace fate421
