#include "cfmac/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace cfmac {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// n (n-1) ... (n-k+1)
double falling(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

double factorial(int n) { return falling(n, n); }

using Multiset = std::vector<int>;  // sorted parts >= 2; empty = no collision
using Dist = std::map<Multiset, double>;

void check_state(const CollisionState& s, int length, int stations) {
  if (stations < 1 || length < 1) throw std::invalid_argument("chain needs N >= 1 and C >= 1");
  if (stations > length) throw std::invalid_argument("chain needs N <= C");
  if (!std::is_sorted(s.parts.begin(), s.parts.end()))
    throw std::invalid_argument("collision state parts must be sorted");
  for (int p : s.parts)
    if (p < 2) throw std::invalid_argument("collision state parts must be >= 2");
  if (s.colliding() > stations) throw std::invalid_argument("collision state holds more than N stations");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
}

// Every stay vector (L_1..L_k) with its probability, grouped by the parts it
// leaves behind and the number of movers.
std::map<std::pair<Multiset, int>, double> stay_outcomes(const CollisionState& from, double gamma) {
  std::map<std::pair<Multiset, int>, double> out;
  const auto& parts = from.parts;
  std::vector<int> stays(parts.size(), 0);
  auto rec = [&](auto&& self, std::size_t j, double w) -> void {
    if (j == parts.size()) {
      Multiset kept;
      int movers = 0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (stays[i] >= 2) kept.push_back(stays[i]);
        movers += parts[i] - stays[i];
      }
      std::sort(kept.begin(), kept.end());
      out[{kept, movers}] += w;
      return;
    }
    for (int l = 0; l <= parts[j]; ++l) {
      stays[j] = l;
      self(self, j + 1, w * binom(parts[j], l) * std::pow(gamma, l) * std::pow(1.0 - gamma, parts[j] - l));
    }
  };
  rec(rec, 0, 1.0);
  return out;
}

Multiset merged(const Multiset& a, const Multiset& b) {
  Multiset m(a);
  m.insert(m.end(), b.begin(), b.end());
  std::sort(m.begin(), m.end());
  return m;
}

NextStates to_next_states(const Dist& dist) {
  NextStates out;
  for (const auto& [parts, p] : dist) {
    if (p == 0.0) continue;
    if (parts.empty())
      out.emplace_back(std::nullopt, p);
    else
      out.emplace_back(CollisionState{parts}, p);
  }
  return out;
}

// Collision parts formed when `movers` stations each pick one of `bins`
// slots uniformly: every occupancy vector, multinomial weight.
Dist movers_enumerated(int movers, int bins) {
  Dist out;
  if (movers == 0) {
    out[{}] = 1.0;
    return out;
  }
  const double scale = std::pow(1.0 / bins, movers) * factorial(movers);
  std::vector<int> occ(bins, 0);
  auto rec = [&](auto&& self, int bin, int left, double denom) -> void {
    if (bin == bins - 1) {
      occ[bin] = left;
      Multiset parts;
      for (int c : occ)
        if (c >= 2) parts.push_back(c);
      std::sort(parts.begin(), parts.end());
      out[parts] += scale / (denom * factorial(left));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      occ[bin] = c;
      self(self, bin + 1, left - c, denom * factorial(c));
    }
  };
  rec(rec, 0, movers, 1.0);
  return out;
}

// Same distribution, one bin at a time: the next bin takes a Binomial(r, 1/b)
// share of the r movers left when b bins remain.
Dist movers_recursive(int movers, int bins) {
  std::map<std::pair<int, Multiset>, double> cur;
  cur[{movers, {}}] = 1.0;
  for (int b = bins; b >= 1; --b) {
    std::map<std::pair<int, Multiset>, double> next;
    for (const auto& [key, w] : cur) {
      const auto& [left, parts] = key;
      if (b == 1 || left == 0) {
        Multiset p = parts;
        if (left >= 2) {
          p.push_back(left);
          std::sort(p.begin(), p.end());
        }
        next[{0, p}] += w;
        continue;
      }
      const double q = 1.0 / b;
      for (int c = 0; c <= left; ++c) {
        const double pc = binom(left, c) * std::pow(q, c) * std::pow(1.0 - q, left - c);
        if (pc == 0.0) continue;
        Multiset p = parts;
        if (c >= 2) {
          p.push_back(c);
          std::sort(p.begin(), p.end());
        }
        next[{left - c, p}] += w * pc;
      }
    }
    cur = std::move(next);
  }
  Dist out;
  for (const auto& [key, w] : cur) out[key.second] += w;
  return out;
}

template <class MoverFn>
NextStates transition_row_impl(const CollisionState& from, int length, int stations, double gamma, MoverFn movers) {
  check_state(from, length, stations);
  check_gamma(gamma);
  const int idle = from.idle_slots(length, stations);
  if (idle < 1) throw std::logic_error("collision state without idle slots");
  std::map<int, Dist> mover_cache;
  Dist dist;
  for (const auto& [key, w] : stay_outcomes(from, gamma)) {
    const auto& [kept, m] = key;
    auto it = mover_cache.find(m);
    if (it == mover_cache.end()) it = mover_cache.emplace(m, movers(m, idle)).first;
    for (const auto& [parts, q] : it->second) dist[merged(kept, parts)] += w * q;
  }
  return to_next_states(dist);
}

}  // namespace

NextStates transition_row_enumerated(const CollisionState& from, int length, int stations, double gamma) {
  return transition_row_impl(from, length, stations, gamma, movers_enumerated);
}

NextStates transition_row(const CollisionState& from, int length, int stations, double gamma) {
  return transition_row_impl(from, length, stations, gamma, movers_recursive);
}

double transition_prob_exact(const CollisionState& from, const std::optional<CollisionState>& to, int length,
                             int stations, double gamma) {
  if (to) check_state(*to, length, stations);
  for (const auto& [state, p] : transition_row_enumerated(from, length, stations, gamma))
    if (state == to) return p;
  return 0.0;
}

double transition_prob_formula(const CollisionState& from, const CollisionState& to, int length, int stations,
                               double gamma) {
  check_state(from, length, stations);
  check_state(to, length, stations);
  check_gamma(gamma);
  if (from.colliding() != to.colliding())
    throw std::invalid_argument("formula covers transitions within one N_C block only");
  const int idle = from.idle_slots(length, stations);
  const auto& k = from.parts;
  const auto& l = to.parts;
  std::vector<bool> used(l.size(), false);
  double total = 0.0;

  auto rec = [&](auto&& self, std::size_t j, int fixed, double w) -> void {
    if (j == k.size()) {
      int m = 0;
      double denom = 1.0;
      int free_slots = 0;
      for (std::size_t t = 0; t < l.size(); ++t) {
        if (used[t]) continue;
        m += l[t];
        denom *= factorial(l[t]);
        ++free_slots;
      }
      const double jump = factorial(m) / denom * std::pow((1.0 - gamma) / idle, m);
      total += w * jump * falling(idle, free_slots);
      return;
    }
    // slot j keeps none of its stations
    self(self, j + 1, fixed, w);
    // slot j keeps L_t of them and becomes target slot t
    for (std::size_t t = 0; t < l.size(); ++t) {
      if (used[t] || l[t] > k[j]) continue;
      used[t] = true;
      self(self, j + 1, fixed + 1, w * binom(k[j], l[t]) * std::pow(gamma, l[t]));
      used[t] = false;
    }
  };
  rec(rec, 0, 0, 1.0);
  return total / symmetry_count(to);
}

NextStates initial_probs(int length, int stations) {
  if (stations < 1 || length < 1) throw std::invalid_argument("initial_probs needs N >= 1 and C >= 1");
  if (stations > length) throw std::invalid_argument("initial_probs needs N <= C");
  const double scale = std::pow(1.0 / length, stations);
  NextStates out;
  // All N in distinct slots.
  out.emplace_back(std::nullopt, falling(length, stations) * scale);
  for (const auto& s : enumerate_states(stations)) {
    const int nc = s.colliding();
    const int singles = stations - nc;
    double multinomial = factorial(nc);
    for (int p : s.parts) multinomial /= factorial(p);
    // Ordered choice of collision slots among those left by the singles.
    const double w = binom(length, singles) * falling(stations, singles) *
                     falling(length - singles, s.collision_slots()) / symmetry_count(s) * multinomial;
    out.emplace_back(s, w * scale);
  }
  return out;
}

int ChainModel::index_of(const CollisionState& state) const {
  auto it = std::lower_bound(states.begin(), states.end(), state, [](const CollisionState& a, const CollisionState& b) {
    if (a.colliding() != b.colliding()) return a.colliding() > b.colliding();
    if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size();
    return a.parts < b.parts;
  });
  if (it == states.end() || !(*it == state)) throw std::out_of_range("state not in chain");
  return 1 + static_cast<int>(it - states.begin());
}

ChainModel build_chain(int length, int stations, double gamma) {
  if (stations > kMaxChainStations)
    throw std::invalid_argument("chain size guard: N must be <= " + std::to_string(kMaxChainStations));
  if (stations < 1 || length < 1) throw std::invalid_argument("chain needs N >= 1 and C >= 1");
  if (stations > length) throw std::invalid_argument("chain needs N <= C");
  check_gamma(gamma);

  ChainModel chain;
  chain.length = length;
  chain.stations = stations;
  chain.gamma = gamma;
  for (int nc = stations; nc >= 2; --nc) {
    auto block = partitions_at_least_two(nc);
    std::sort(block.begin(), block.end(), [](const CollisionState& a, const CollisionState& b) {
      if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size();
      return a.parts < b.parts;
    });
    const int begin = static_cast<int>(chain.states.size());
    chain.states.insert(chain.states.end(), block.begin(), block.end());
    chain.blocks.emplace_back(begin, static_cast<int>(chain.states.size()));
    chain.block_colliding.push_back(nc);
  }

  const int n = static_cast<int>(chain.states.size()) + 2;
  const int absorbing = n - 1;
  chain.pi = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [state, p] : initial_probs(length, stations))
    chain.pi(0, state ? chain.index_of(*state) : absorbing) += p;

  for (std::size_t b = 0; b < chain.blocks.size(); ++b) {
    const auto [begin, end] = chain.blocks[b];
    for (int i = begin; i < end; ++i) {
      const auto& from = chain.states[i];
      const int row = i + 1;
      for (const auto& [state, p] : transition_row(from, length, stations, gamma)) {
        if (state && state->colliding() == from.colliding()) continue;
        chain.pi(row, state ? chain.index_of(*state) : absorbing) += p;
      }
      for (int j = begin; j < end; ++j)
        chain.pi(row, j + 1) = transition_prob_formula(from, chain.states[j], length, stations, gamma);
    }
  }
  chain.pi(absorbing, absorbing) = 1.0;
  return chain;
}

double spectral_radius(const Eigen::MatrixXd& a, double tol, int max_iter) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius needs a square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(a(0, 0));
  // The shift keeps every iterate strictly positive and removes periodicity.
  const Eigen::MatrixXd b = a + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd y = b * x;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = y(i) / x(i);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo <= tol) return 0.5 * (lo + hi) - 1.0;
    x = y / y.maxCoeff();
    if (x.minCoeff() < 1e-250) break;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EigenReport second_eigenvalue(const ChainModel& chain) {
  EigenReport report;
  for (std::size_t b = 0; b < chain.blocks.size(); ++b) {
    const auto [begin, end] = chain.blocks[b];
    const Eigen::MatrixXd g = chain.pi.block(begin + 1, begin + 1, end - begin, end - begin);
    const double v = spectral_radius(g);
    report.blocks.push_back({chain.block_colliding[b], v});
    if (v > report.lambda) {
      report.lambda = v;
      report.argmax_colliding = chain.block_colliding[b];
    }
  }
  return report;
}

double lambda_star_closed(int length, int stations, double gamma) {
  if (stations > length) throw std::invalid_argument("closed form needs N <= C");
  check_gamma(gamma);
  return gamma * gamma + (1.0 - gamma) * (1.0 - gamma) / (length - stations + 1);
}

double gamma_opt(int length, int stations) {
  if (stations > length) throw std::invalid_argument("gamma_opt needs N <= C");
  return 1.0 / (length - stations + 2);
}

Eigen::VectorXd expected_absorption_times(const ChainModel& chain) {
  const int t = chain.transient_count();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(t);
  // Blocks only feed later blocks, so solve from the last one backwards.
  for (auto b = static_cast<int>(chain.blocks.size()) - 1; b >= 0; --b) {
    const auto [begin, end] = chain.blocks[b];
    const int size = end - begin;
    const int r0 = begin + 1;
    const int after = r0 + size;
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(size);
    if (after < t) rhs += chain.pi.block(r0, after, size, t - after) * x.segment(after, t - after);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(size, size) - chain.pi.block(r0, r0, size, size);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw std::runtime_error("I - G is singular");
    x.segment(r0, size) = lu.solve(rhs);
  }
  x(0) = 1.0;
  if (t > 1) x(0) += chain.pi.block(0, 1, 1, t - 1).row(0).dot(x.segment(1, t - 1));
  return x;
}

double mean_convergence(const ChainModel& chain) { return expected_absorption_times(chain)(0); }

double LmacBound::tail(int n) const { return std::pow(1.0 - k, n); }

LmacBound lmac_bound(double beta, int length, int stations) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (length < 2) throw std::invalid_argument("bound needs C >= 2");
  if (stations < 1 || stations > length) throw std::invalid_argument("bound needs 1 <= N <= C");
  const double a = (1.0 - beta) / (length - 1);
  return {std::pow(a, stations) * std::pow(beta * a, stations)};
}

}  // namespace cfmac
