#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace voxmat {
namespace pareto {

enum class Direction { minimize, maximize };

struct ObjectivePoint {
  std::vector<double> values;
  std::vector<Direction> directions;
  int id = 0;
};

// True iff a is no worse than b everywhere and strictly better somewhere.
inline bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  if (a.values.size() != b.values.size() ||
      a.directions.size() != a.values.size() ||
      b.directions.size() != b.values.size())
    throw std::invalid_argument("dominates: dimension mismatch");
  bool strictly_better = false;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double av = a.directions[k] == Direction::minimize ? a.values[k] : -a.values[k];
    const double bv = b.directions[k] == Direction::minimize ? b.values[k] : -b.values[k];
    if (av > bv) return false;
    if (av < bv) strictly_better = true;
  }
  return strictly_better;
}

// Fast non-dominated sort (dominance counts + dominated lists). Returns
// fronts of point ids, best front first; ids within a front keep input order.
inline std::vector<std::vector<int>> non_dominated_sort(
    const std::vector<ObjectivePoint>& points) {
  const std::size_t n = points.size();
  std::vector<int> dominated_count(n, 0);
  std::vector<std::vector<std::size_t>> dominated_by(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated_by[i].push_back(j);
        ++dominated_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated_by[j].push_back(i);
        ++dominated_count[i];
      }
    }
  }

  std::vector<std::vector<int>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominated_count[i] == 0) current.push_back(i);

  while (!current.empty()) {
    std::vector<int> front_ids;
    front_ids.reserve(current.size());
    for (std::size_t i : current) front_ids.push_back(points[i].id);
    fronts.push_back(std::move(front_ids));

    std::vector<std::size_t> next;
    for (std::size_t i : current)
      for (std::size_t j : dominated_by[i])
        if (--dominated_count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

// Crowding distance per Deb's definition, aligned with the given front order.
// Boundary points per objective get infinity; a zero objective range
// contributes nothing.
inline std::vector<double> crowding_distance(
    const std::vector<ObjectivePoint>& front) {
  const std::size_t n = front.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  const std::size_t k_objectives = front[0].values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < k_objectives; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return front[a].values[k] < front[b].values[k];
    });
    const double lo = front[order.front()].values[k];
    const double hi = front[order.back()].values[k];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double range = hi - lo;
    if (range <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (dist[order[i]] == inf) continue;
      dist[order[i]] += (front[order[i + 1]].values[k] -
                         front[order[i - 1]].values[k]) / range;
    }
  }
  return dist;
}

// NSGA-II survivor selection: fill by front rank, resolve the partial front
// by descending crowding distance, break ties by ascending id.
inline std::vector<int> select(const std::vector<ObjectivePoint>& points,
                               std::size_t n) {
  if (n > points.size())
    throw std::invalid_argument("select: n exceeds population size");
  std::vector<int> survivors;
  survivors.reserve(n);

  const auto fronts = non_dominated_sort(points);
  for (const auto& front_ids : fronts) {
    if (survivors.size() == n) break;
    if (survivors.size() + front_ids.size() <= n) {
      survivors.insert(survivors.end(), front_ids.begin(), front_ids.end());
      continue;
    }
    // Partial front: rank members by crowding distance.
    std::vector<ObjectivePoint> front;
    front.reserve(front_ids.size());
    for (int id : front_ids)
      for (const auto& p : points)
        if (p.id == id) { front.push_back(p); break; }
    const std::vector<double> dist = crowding_distance(front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (dist[a] != dist[b]) return dist[a] > dist[b];
      return front[a].id < front[b].id;
    });
    for (std::size_t i = 0; survivors.size() < n; ++i)
      survivors.push_back(front[order[i]].id);
  }
  return survivors;
}

}  // namespace pareto
}  // namespace voxmat
