#include "jolt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace jolt {

namespace {

double exhaustive_assignment(const std::vector<double>& cost, int rows, int cols) {
  // rows <= cols; try every injective map rows -> cols.
  std::vector<int> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // Enumerate permutations of column subsets via full permutation of columns,
  // using only the first `rows` entries; dedupe cost by sorting tail.
  std::sort(perm.begin(), perm.end());
  do {
    double c = 0.0;
    for (int i = 0; i < rows; ++i) c += cost[i * cols + perm[i]];
    best = std::min(best, c);
    // Skip permutations that only reorder the unused tail.
    std::reverse(perm.begin() + rows, perm.end());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Hungarian algorithm (Jonker-Volgenant style shortest augmenting paths),
/// O(rows^2 * cols), for rows <= cols.
double hungarian_assignment(const std::vector<double>& cost, int rows, int cols) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> match(cols + 1, 0);  // matched row per column, 1-based
  for (int i = 1; i <= rows; ++i) {
    std::vector<double> minv(cols + 1, kInf);
    std::vector<bool> used(cols + 1, false);
    std::vector<int> way(cols + 1, 0);
    int j0 = 0;
    match[0] = i;
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= cols; ++j) {
    if (match[j] != 0) total += cost[(match[j] - 1) * cols + (j - 1)];
  }
  return total;
}

}  // namespace

double min_assignment_cost(const std::vector<double>& cost, int rows, int cols,
                           bool exhaustive) {
  if (rows == 0) return 0.0;
  if (rows > cols) throw std::invalid_argument("min_assignment_cost: rows must be <= cols");
  return exhaustive ? exhaustive_assignment(cost, rows, cols)
                    : hungarian_assignment(cost, rows, cols);
}

double ospa(const std::vector<Eigen::Vector2d>& estimates,
            const std::vector<Eigen::Vector2d>& truths, const OspaConfig& cfg) {
  const std::vector<Eigen::Vector2d>* small = &estimates;
  const std::vector<Eigen::Vector2d>* big = &truths;
  if (small->size() > big->size()) std::swap(small, big);
  const int m = static_cast<int>(small->size());
  const int n = static_cast<int>(big->size());
  if (n == 0) return 0.0;
  if (m == 0) return cfg.c;

  std::vector<double> cost(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      cost[i * n + j] = std::pow(std::min(((*small)[i] - (*big)[j]).norm(), cfg.c), cfg.p);

  const double assigned = min_assignment_cost(cost, m, n, n <= 6);
  const double total = assigned + (n - m) * std::pow(cfg.c, cfg.p);
  return std::pow(total / n, 1.0 / cfg.p);
}

std::vector<double> aggregate(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) return {};
  const std::size_t T = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != T) throw std::invalid_argument("aggregate: horizon mismatch across runs");
  }
  std::vector<double> mean(T, 0.0);
  for (const auto& r : runs)
    for (std::size_t t = 0; t < T; ++t) mean[t] += r[t] / runs.size();
  return mean;
}

std::vector<double> consistent_track_error(const std::vector<std::vector<Eigen::Vector2d>>& tracks,
                                           const std::vector<Eigen::Vector2d>& truth) {
  const std::size_t T = truth.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(T, nan);
  double best_sum = std::numeric_limits<double>::infinity();
  const std::vector<Eigen::Vector2d>* best = nullptr;
  for (const auto& track : tracks) {
    if (track.size() != T)
      throw std::invalid_argument("consistent_track_error: horizon mismatch");
    double sum = 0.0;
    bool any = false;
    for (std::size_t t = 0; t < T; ++t) {
      if (std::isnan(truth[t].x()) || std::isnan(track[t].x())) continue;
      sum += (track[t] - truth[t]).norm();
      any = true;
    }
    if (any && sum < best_sum) {
      best_sum = sum;
      best = &track;
    }
  }
  if (best) {
    for (std::size_t t = 0; t < T; ++t) {
      if (!std::isnan(truth[t].x()) && !std::isnan((*best)[t].x()))
        out[t] = ((*best)[t] - truth[t]).norm();
    }
  }
  return out;
}

}  // namespace jolt
