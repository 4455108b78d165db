#pragma once

// Friedkin-Johnsen reference model over daily follow-graph snapshots.
//
// Each agent i blends the mean opinion of the agents it follows with its own
// frozen initial opinion:
//
//   x_i' = lambda_i * mean_{j in followees(i)} x_j + (1 - lambda_i) * x0_i
//
// Agents with no followees stay at x0_i. Influence weights are uniform over
// followees (row-stochastic W) and flow along the follow direction.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polisim/domain.hpp"

namespace polisim {

/// Row-stochastic influence matrix in CSR form; row i lists the column indices
/// of the agents i follows, each with weight 1 / out-degree.
struct InfluenceMatrix {
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> columns;

  std::size_t size() const noexcept { return row_offsets.size() - 1; }
  std::size_t out_degree(std::size_t row) const noexcept {
    return row_offsets[row + 1] - row_offsets[row];
  }

  /// Rows and columns follow `agents`. Edges to agents outside the list are ignored.
  static InfluenceMatrix from_graph(const SocialGraph& graph, std::span<const AgentId> agents);
};

struct FJParams {
  std::vector<double> susceptibility;  // lambda_i in [0, 1], one per agent
  std::size_t max_iters = 10000;
  double tolerance = 1e-8;
  /// 0 iterates each day to convergence; k > 0 applies exactly k steps per day.
  std::size_t steps_per_day = 0;
  bool parallel = true;
};

namespace serial {
/// Reference kernel. `out` must not alias `x` or `x0`.
void fj_step(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
             std::span<const double> lambda, std::span<double> out);
}  // namespace serial

namespace parallel {
/// OpenMP kernel; each row is computed exactly as in serial::fj_step, so the
/// output is bit-identical.
void fj_step(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
             std::span<const double> lambda, std::span<double> out);
}  // namespace parallel

/// Validating wrapper; throws ValidationError on dimension mismatch,
/// out-of-range lambda or opinions outside [-1, 1].
std::vector<double> fj_step(std::span<const double> x, std::span<const double> x0,
                            const InfluenceMatrix& w, std::span<const double> lambda,
                            bool use_parallel = true);

/// Graph-level convenience overload; agents are indexed in ascending id order.
std::vector<double> fj_step(std::span<const double> x, std::span<const double> x0,
                            const SocialGraph& graph, std::span<const double> lambda);

struct FJDayResult {
  int day = 0;
  std::vector<double> opinions;
  std::size_t iterations = 0;
  double last_change = 0.0;  // infinity norm of the final step
  bool converged = false;
};

/// Called after every iteration with (day, previous iterate, new iterate).
using FJObserver = std::function<void(int, std::span<const double>, std::span<const double>)>;

/// Runs the model across snapshots in order. Within a day, iterates on that
/// day's graph from the previous day's result (x0 for the first snapshot)
/// until the infinity-norm change falls below tolerance, max_iters is hit, or
/// steps_per_day steps were applied.
std::vector<FJDayResult> fj_run(std::span<const GraphSnapshot> snapshots,
                                std::span<const AgentId> agents, std::span<const double> x0,
                                const FJParams& params, const FJObserver& observer = {});

/// Infinity norm of x - (Lambda W x + (I - Lambda) x0).
double fj_residual(std::span<const double> x, std::span<const double> x0, const InfluenceMatrix& w,
                   std::span<const double> lambda);

}  // namespace polisim
