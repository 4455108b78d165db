#include "polisim/fj.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "polisim/errors.hpp"

namespace polisim {

InfluenceMatrix InfluenceMatrix::from_graph(const SocialGraph& graph,
                                            std::span<const AgentId> agents) {
  std::unordered_map<AgentId, std::size_t> index;
  index.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) index.emplace(agents[i], i);

  InfluenceMatrix w;
  w.row_offsets.reserve(agents.size() + 1);
  for (const AgentId& id : agents) {
    if (graph.contains(id)) {
      for (const AgentId& followee : graph.followees(id)) {
        auto it = index.find(followee);
        if (it != index.end()) w.columns.push_back(it->second);
      }
    }
    w.row_offsets.push_back(w.columns.size());
  }
  return w;
}

namespace {

inline double step_row(std::size_t i, std::span<const double> x, std::span<const double> x0,
                       const InfluenceMatrix& w, std::span<const double> lambda) {
  const std::size_t begin = w.row_offsets[i];
  const std::size_t end = w.row_offsets[i + 1];
  if (begin == end) return x0[i];
  double sum = 0.0;
  for (std::size_t k = begin; k < end; ++k) sum += x[w.columns[k]];
  const double neighbour_mean = sum / static_cast<double>(end - begin);
  return lambda[i] * neighbour_mean + (1.0 - lambda[i]) * x0[i];
}

void check_dims(std::size_t x, std::size_t x0, std::size_t w, std::size_t lambda) {
  if (x != x0 || x != w || x != lambda) {
    throw ValidationError("fj_step dimension mismatch: |x|=" + std::to_string(x) + " |x0|=" +
                          std::to_string(x0) + " |W|=" + std::to_string(w) +
                          " |lambda|=" + std::to_string(lambda));
  }
}

void check_ranges(std::span<const double> x, std::span<const double> x0,
                  std::span<const double> lambda) {
  for (double v : lambda) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("susceptibility outside [0, 1]");
  }
  for (auto vec : {x, x0}) {
    for (double v : vec) {
      if (!(v >= -1.0 && v <= 1.0)) throw ValidationError("opinion outside [-1, 1]");
    }
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

namespace serial {

void fj_step(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
             std::span<const double> lambda, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = step_row(i, x, x0, w, lambda);
}

}  // namespace serial

namespace parallel {

void fj_step(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
             std::span<const double> lambda, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = step_row(static_cast<std::size_t>(i), x, x0, w, lambda);
  }
}

}  // namespace parallel

std::vector<double> fj_step(std::span<const double> x, std::span<const double> x0,
                            const InfluenceMatrix& w, std::span<const double> lambda,
                            bool use_parallel) {
  check_dims(x.size(), x0.size(), w.size(), lambda.size());
  check_ranges(x, x0, lambda);
  std::vector<double> out(x.size());
  if (use_parallel) {
    parallel::fj_step(x, x0, w, lambda, out);
  } else {
    serial::fj_step(x, x0, w, lambda, out);
  }
  return out;
}

std::vector<double> fj_step(std::span<const double> x, std::span<const double> x0,
                            const SocialGraph& graph, std::span<const double> lambda) {
  const std::vector<AgentId> agents = graph.nodes();
  return fj_step(x, x0, InfluenceMatrix::from_graph(graph, agents), lambda);
}

double fj_residual(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
                   std::span<const double> lambda) {
  check_dims(x.size(), x0.size(), w.size(), lambda.size());
  std::vector<double> fx(x.size());
  serial::fj_step(x, x0, w, lambda, fx);
  return max_abs_diff(x, fx);
}

std::vector<FJDayResult> fj_run(std::span<const GraphSnapshot> snapshots,
                                std::span<const AgentId> agents, std::span<const double> x0,
                                const FJParams& params, const FJObserver& observer) {
  const std::size_t n = agents.size();
  check_dims(n, x0.size(), n, params.susceptibility.size());
  check_ranges(x0, x0, params.susceptibility);
  if (!(params.tolerance > 0.0)) throw ValidationError("FJ tolerance must be positive");
  if (params.max_iters == 0) throw ValidationError("FJ max_iters must be positive");

  std::vector<FJDayResult> results;
  results.reserve(snapshots.size());
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> next(n);
  const std::span<const double> lambda = params.susceptibility;

  for (const GraphSnapshot& snap : snapshots) {
    const InfluenceMatrix w = InfluenceMatrix::from_graph(snap.graph, agents);
    const std::size_t limit =
        params.steps_per_day > 0 ? params.steps_per_day : params.max_iters;
    FJDayResult day{snap.day, {}, 0, 0.0, false};
    for (std::size_t it = 0; it < limit; ++it) {
      if (params.parallel) {
        parallel::fj_step(x, x0, w, lambda, next);
      } else {
        serial::fj_step(x, x0, w, lambda, next);
      }
      day.last_change = max_abs_diff(next, x);
      if (observer) observer(snap.day, x, next);
      x.swap(next);
      ++day.iterations;
      if (day.last_change < params.tolerance) {
        day.converged = true;
        if (params.steps_per_day == 0) break;
      }
    }
    day.opinions = x;
    results.push_back(std::move(day));
  }
  return results;
}

}  // namespace polisim
