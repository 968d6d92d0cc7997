// Copyright 2026 The sgwd Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Optimal transport between two node-embedding sets with uniform marginals:
// entropic (Sinkhorn) solver, exact assignment-based oracle, and the
// frozen-plan gradient of the transport cost.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgwd/embedding.hpp"
#include "sgwd/matrix.hpp"

namespace sgwd {

// Pairwise squared Euclidean distances, |source| x |target|.
struct CostMatrix {
  Matrix values;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

CostMatrix cost_matrix(const EmbeddingMatrix& source,
                       const EmbeddingMatrix& target);

struct TransportPlan {
  Matrix entries;
  std::size_t iterations = 0;
  double marginal_violation = 0.0;
  bool converged = false;
  bool log_domain = false;
};

enum class SinkhornDomain { kAuto, kDirect, kLog };

struct SinkhornConfig {
  double lambda = 100.0;  // inverse temperature; larger is closer to exact OT
  std::size_t max_iterations = 1000;
  double tolerance = 1e-9;  // on max marginal violation
  SinkhornDomain domain = SinkhornDomain::kAuto;

  // Throws std::invalid_argument when out of range.
  void validate() const;
};

// kAuto switches to log-domain updates once lambda * max(M) exceeds this.
inline constexpr double kLogDomainThreshold = 50.0;

// Largest absolute deviation of row sums from 1/rows and column sums from
// 1/cols.
double marginal_violation(const Matrix& plan);

// Entropy-smoothed transport plan T = diag(u) exp(-lambda M) diag(v) under
// uniform marginals. Alternating u/v scaling updates; in the log domain
// lambda is reached by doubling from a stable starting value, and sweeps
// that stall are interleaved with Newton steps on the dual potentials.
// `iterations` counts sweeps. Hitting max_iterations is reported through
// `converged`, not thrown. Throws NumericError on a non-finite cost.
TransportPlan sinkhorn(const CostMatrix& cost, const SinkhornConfig& cfg);

struct GwdResult {
  double distance = 0.0;  // <T, M>
  TransportPlan plan;
};

// Graph Wasserstein distance between two node-embedding sets.
GwdResult gwd(const EmbeddingMatrix& source, const EmbeddingMatrix& target,
              const SinkhornConfig& cfg);

// Guard on rows * cols for exact_ot.
inline constexpr std::size_t kExactOtMaxCells = 400;

struct ExactResult {
  double cost = 0.0;
  TransportPlan plan;
};

// Exact minimum of <T, M> over uniform-marginal couplings. Both sides are
// expanded to lcm(rows, cols) unit-mass copies and solved as an assignment
// problem. Throws std::length_error past kExactOtMaxCells.
ExactResult exact_ot(const CostMatrix& cost);

// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
// O(n^3)). Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

struct GwdGradient {
  Matrix source;  // d<T,M>/d source rows
  Matrix target;  // d<T,M>/d target rows
};

// Gradient of <T, M(source, target)> with T held fixed.
GwdGradient gwd_gradient(const EmbeddingMatrix& source,
                         const EmbeddingMatrix& target,
                         const TransportPlan& plan);

// CSV with a header row of target ids and a leading column of source ids.
void write_plan_csv(std::ostream& out, const Matrix& plan,
                    const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids);

struct LabeledMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  Matrix values;
};

LabeledMatrix read_plan_csv(std::istream& in);

}  // namespace sgwd
