#include "fate421/evaluator.hpp"

#include "fate421/detail/parallel.hpp"
#include "fate421/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace fate421 {

TransitionKernel<Rational> exact_transition_matrix(const Strategy& strategy, const FateGraph& graph) {
  const int last = graph.last_layer();
  std::vector<std::vector<Combination>> states(static_cast<std::size_t>(last) + 1);
  std::vector<Matrix<Rational>> sigma;
  states[0].push_back(graph.node(0, 0).state);

  for (int j = 0; j < last; ++j) {
    const auto& from = states[static_cast<std::size_t>(j)];
    std::vector<std::map<Combination, Rational>> rows(from.size());
    std::set<Combination> reached;
    for (std::size_t r = 0; r < from.size(); ++r) {
      const auto& node = graph.node(j, *graph.find(j, from[r]));
      for (const auto& event : node.events) {
        if (node.absorbing) {
          rows[r][node.state] += event.probability;
          reached.insert(node.state);
          continue;
        }
        for (auto& [successor, weight] : strategy.law({j, node.state, event.cast})) {
          check_decision(graph.config(), j, node.state, event.cast, successor);
          rows[r][successor] += event.probability * weight;
          reached.insert(successor);
        }
      }
    }
    auto& to = states[static_cast<std::size_t>(j) + 1];
    to.assign(reached.begin(), reached.end());
    Matrix<Rational> m = Matrix<Rational>::Zero(static_cast<Eigen::Index>(from.size()),
                                                static_cast<Eigen::Index>(to.size()));
    for (std::size_t r = 0; r < from.size(); ++r)
      for (const auto& [successor, p] : rows[r]) {
        auto c = std::lower_bound(to.begin(), to.end(), successor) - to.begin();
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = p;
      }
    sigma.push_back(std::move(m));
  }
  return TransitionKernel<Rational>(std::move(states), std::move(sigma));
}

bool DualityReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const DualityEntry& e) { return e.equal; });
}

std::vector<int> DualityReport::offending() const {
  std::vector<int> out;
  for (const auto& e : entries)
    if (!e.equal) out.push_back(e.time);
  return out;
}

DualityReport duality_check(const Strategy& strategy, const UtilitySpec& utility, const FateGraph& graph) {
  auto kernel = transition_matrix<Rational>(strategy, graph);
  auto u = kolmogorov_sweep(kernel, utility);
  auto density = density_sweep(kernel);
  const int last = kernel.last_layer();

  DualityReport report;
  report.initial_value = u.front()(0);
  for (int j = 0; j <= last + 1; ++j) {
    const int k = std::min(j, last);
    Vector<Rational> rho = j <= last ? density.rho[static_cast<std::size_t>(k)]
                                     : Vector<Rational>(kernel.sigma(j - 1).transpose() * density.rho.back());
    Rational inner = u[static_cast<std::size_t>(k)].dot(rho);
    report.entries.push_back({j, inner, inner == report.initial_value});
  }
  return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

int draw_face(std::mt19937_64& rng, int faces) {
  const auto f = static_cast<std::uint64_t>(faces);
  const std::uint64_t excess = (0 - f) % f;  // 2^64 mod F
  for (;;) {
    const std::uint64_t x = rng();
    if (excess == 0 || x < 0 - excess) return static_cast<int>(x % f) + 1;
  }
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Moments {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

constexpr std::uint64_t chunk_size = 4096;

}  // namespace

MonteCarloResult monte_carlo(const Strategy& strategy, const UtilitySpec& utility, const RoundConfig& config,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw PreconditionError("Monte Carlo needs at least one sample");
  config.validate();
  const std::uint64_t chunks = (samples + chunk_size - 1) / chunk_size;
  std::vector<Moments> partial(chunks);

  // Results are full states, or the origin of a round without casts.
  std::map<Combination, double> judged;
  auto results = config.casts == 0 ? std::vector<Combination>{Combination(config.faces)}
                                   : combinations_of_norm(config.dice, config.faces);
  for (const auto& d : results) {
    const Extended u = utility(config.casts, d);
    judged.emplace(d, u.finite() ? to_double(u.value()) : -std::numeric_limits<double>::infinity());
  }

  detail::parallel_for(chunks, threads, [&](std::size_t c) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c)));
    const std::uint64_t begin = c * chunk_size;
    const std::uint64_t end = std::min(samples, begin + chunk_size);
    Moments m;
    std::vector<int> faces;
    for (std::uint64_t s = begin; s < end; ++s) {
      Combination state(config.faces);
      for (int j = 0; j < config.casts; ++j) {
        if (state.norm() == config.dice) continue;
        faces.clear();
        for (int k = state.norm(); k < config.dice; ++k) faces.push_back(draw_face(rng, config.faces));
        const Combination event = Combination::from_faces(faces, config.faces);
        auto law = strategy.law({j, state, event});
        if (law.size() == 1) {
          state = law.front().first;
        } else {
          double u = draw_unit(rng);
          std::size_t pick = law.size() - 1;
          for (std::size_t i = 0; i < law.size(); ++i) {
            u -= to_double(law[i].second);
            if (u < 0) {
              pick = i;
              break;
            }
          }
          state = law[pick].first;
        }
      }
      m.add(judged.at(state));
    }
    partial[c] = m;
  });

  Moments total;
  for (const auto& m : partial) total.merge(m);
  MonteCarloResult out;
  out.mean = total.mean;
  out.samples = samples;
  out.seed = seed;
  out.standard_error = samples > 1 ? std::sqrt(total.m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return out;
}

std::map<Combination, Rational> result_law(const Strategy& strategy, const FateGraph& graph, int time,
                                           const Combination& state) {
  if (time < 0 || time > graph.last_layer() || !graph.find(time, state))
    throw PreconditionError("state '" + state.to_string() + "' is not reachable at time " + std::to_string(time));
  std::map<Combination, Rational> mass{{state, Rational(1)}};
  for (int j = time; j < graph.last_layer(); ++j) {
    std::map<Combination, Rational> next;
    for (const auto& [s, m] : mass) {
      const auto& node = graph.node(j, *graph.find(j, s));
      if (node.absorbing) {
        next[s] += m;
        continue;
      }
      for (const auto& event : node.events)
        for (auto& [successor, weight] : strategy.law({j, s, event.cast})) {
          check_decision(graph.config(), j, s, event.cast, successor);
          next[successor] += m * event.probability * weight;
        }
    }
    mass = std::move(next);
  }
  return mass;
}

Rational expected_value_from(const Strategy& strategy, const UtilitySpec& utility, const FateGraph& graph, int time,
                             const Combination& state) {
  Rational v(0);
  for (const auto& [d, m] : result_law(strategy, graph, time, state))
    v += utility(graph.last_layer(), d).scaled(m).value();
  return v;
}

Rational optimality_ratio(const Rational& policy_value, const Rational& optimal_value) {
  if (optimal_value == 0) throw PreconditionError("optimality ratio against a zero optimum");
  return policy_value / optimal_value;
}

}  // namespace fate421
