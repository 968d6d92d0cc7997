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

// Test-only reference implementations. None of these call into the code
// paths they check: no Hungarian solver, no Sinkhorn, no neighbor index.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "sgwd/embedding.hpp"
#include "sgwd/graph.hpp"
#include "sgwd/matrix.hpp"

namespace sgwd::oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const Matrix& m) {
  Rows r(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  }
  return r;
}

inline EmbeddingMatrix from_rows(const Rows& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return {m, 0};
}

// Plain double loop over pairs of rows.
inline Rows naive_cost(const Rows& xv, const Rows& xw) {
  Rows out(xv.size(), std::vector<double>(xw.size(), 0.0));
  for (std::size_t i = 0; i < xv.size(); ++i) {
    for (std::size_t j = 0; j < xw.size(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < xv[i].size(); ++c) {
        s += (xv[i][c] - xw[j][c]) * (xv[i][c] - xw[j][c]);
      }
      out[i][j] = s;
    }
  }
  return out;
}

// Exact uniform-marginal OT by enumerating every permutation of the
// lcm-expanded assignment problem. Only for lcm(n, m) <= 8.
inline double brute_force_ot(const Rows& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = cost[0].size();
  const std::size_t copies = std::lcm(n, m);
  if (copies > 8) throw std::length_error("brute_force_ot: instance too large");
  std::vector<std::size_t> perm(copies);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t p = 0; p < copies; ++p) {
      s += cost[p / (copies / n)][perm[p] / (copies / m)];
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(copies);
}

// <T, M(xv, xw)> evaluated from scratch.
inline double transport_cost(const Rows& plan, const Rows& xv, const Rows& xw) {
  const Rows m = naive_cost(xv, xw);
  double s = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    for (std::size_t j = 0; j < plan[i].size(); ++j) s += plan[i][j] * m[i][j];
  }
  return s;
}

// Central differences of f with respect to every entry of x.
inline Rows central_difference(const std::function<double(const Rows&)>& f,
                               Rows x, double step) {
  Rows g(x.size(), std::vector<double>(x.empty() ? 0 : x[0].size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < x[i].size(); ++c) {
      const double keep = x[i][c];
      x[i][c] = keep + step;
      const double hi = f(x);
      x[i][c] = keep - step;
      const double lo = f(x);
      x[i][c] = keep;
      g[i][c] = (hi - lo) / (2.0 * step);
    }
  }
  return g;
}

// Non-parametric propagation written directly from the update rule, scanning
// the raw edge list for neighbors on every step.
inline Rows scalar_propagate(const SceneGraph& g, Rows h, std::size_t layers) {
  auto wants = [](NodeKind self, NodeKind other) {
    if (self == NodeKind::kObject) return other != NodeKind::kObject;
    return other == NodeKind::kObject;
  };
  auto position = [&g](const std::string& id) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.node(i).id == id) return i;
    }
    throw std::out_of_range(id);
  };
  for (std::size_t l = 0; l < layers; ++l) {
    Rows next = h;
    for (std::size_t m = 0; m < g.size(); ++m) {
      std::vector<std::size_t> nbrs;
      for (const Edge& e : g.edges()) {
        const std::size_t s = position(e.source);
        const std::size_t t = position(e.target);
        std::size_t other;
        if (s == m) other = t;
        else if (t == m) other = s;
        else continue;
        if (!wants(g.node(m).kind, g.node(other).kind)) continue;
        if (std::find(nbrs.begin(), nbrs.end(), other) == nbrs.end()) nbrs.push_back(other);
      }
      if (nbrs.empty()) continue;
      std::vector<double> d;
      double total = 0.0;
      for (std::size_t k : nbrs) {
        double s = 0.0;
        for (std::size_t c = 0; c < h[m].size(); ++c) s += (h[k][c] - h[m][c]) * (h[k][c] - h[m][c]);
        d.push_back(s);
        total += s;
      }
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const double alpha = total > 0.0 ? d[i] / total : 1.0 / static_cast<double>(nbrs.size());
        for (std::size_t c = 0; c < h[m].size(); ++c) next[m][c] += alpha * h[nbrs[i]][c];
      }
    }
    h = std::move(next);
  }
  return h;
}

inline Rows random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d,
                        double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Rows r(n, std::vector<double>(d));
  for (auto& row : r) {
    for (double& x : row) x = u(rng);
  }
  return r;
}

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace sgwd::oracle
