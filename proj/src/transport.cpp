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

#include "sgwd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "sgwd/error.hpp"

namespace sgwd {

CostMatrix cost_matrix(const EmbeddingMatrix& source,
                       const EmbeddingMatrix& target) {
  if (source.dim() != target.dim()) {
    throw ShapeError("cost_matrix: embedding dimensions differ (" +
                     std::to_string(source.dim()) + " vs " +
                     std::to_string(target.dim()) + ")");
  }
  CostMatrix m{Matrix(source.rows(), target.rows())};
  for (std::size_t i = 0; i < source.rows(); ++i) {
    for (std::size_t j = 0; j < target.rows(); ++j) {
      m.values(i, j) = squared_distance(source.values.row(i), target.values.row(j));
    }
  }
  return m;
}

void SinkhornConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sinkhorn: lambda must be positive and finite");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("sinkhorn: tolerance must be positive");
  }
  if (max_iterations == 0) {
    throw std::invalid_argument("sinkhorn: max_iterations must be positive");
  }
}

double marginal_violation(const Matrix& plan) {
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);
  double worst = 0.0;
  std::vector<double> col(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row += plan(i, j);
      col[j] += plan(i, j);
    }
    worst = std::max(worst, std::abs(row - a));
  }
  for (double c : col) worst = std::max(worst, std::abs(c - b));
  return worst;
}

namespace {

double log_sum_exp(const std::vector<double>& x) {
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

// Dual potentials f = log u, g = log v for one value of lambda, so that
// T_ij = exp(f_i + g_j - lambda M_ij).
class LogPotentials {
 public:
  LogPotentials(const Matrix& cost, std::vector<double>& f, std::vector<double>& g)
      : n_(cost.rows()), m_(cost.cols()), cost_(cost), f_(f), g_(g),
        log_a_(-std::log(static_cast<double>(n_))),
        log_b_(-std::log(static_cast<double>(m_))),
        scaled_(n_, m_), row_buf_(m_), col_buf_(n_) {}

  void set_lambda(double lambda) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) scaled_(i, j) = -lambda * cost_(i, j);
    }
  }

  // One u-update then one v-update; returns the row residual.
  double sweep() {
    const double worst = sweep_unchecked();
    if (!std::isfinite(worst)) {
      throw NumericError("sinkhorn: non-finite potentials in log-domain iteration");
    }
    return worst;
  }

  double sweep_unchecked() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) row_buf_[j] = scaled_(i, j) + g_[j];
      f_[i] = log_a_ - log_sum_exp(row_buf_);
    }
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) col_buf_[i] = scaled_(i, j) + f_[i];
      g_[j] = log_b_ - log_sum_exp(col_buf_);
    }
    return row_residual();
  }

  double row_residual() const {
    const double a = std::exp(log_a_);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m_; ++j) row += std::exp(f_[i] + scaled_(i, j) + g_[j]);
      worst = std::max(worst, std::abs(row - a));
    }
    return worst;
  }

  // Dual objective a sum f + b sum g - sum_ij T_ij, up to a constant.
  double dual() const {
    const double a = std::exp(log_a_);
    const double b = std::exp(log_b_);
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      s += a * f_[i];
      for (std::size_t j = 0; j < m_; ++j) s -= std::exp(f_[i] + scaled_(i, j) + g_[j]);
    }
    for (std::size_t j = 0; j < m_; ++j) s += b * g_[j];
    return s;
  }

  // A plain sweep, or a damped Newton step on the concave dual followed by
  // a sweep when that ends higher on the dual (or level with it and with a
  // smaller residual). The Newton system is gauge-fixed by holding the last
  // g. Returns the row residual of the state kept.
  double newton_or_sweep() {
    const Eigen::Index k = static_cast<Eigen::Index>(n_ + m_ - 1);
    const auto gi = [this](std::size_t j) { return static_cast<Eigen::Index>(n_ + j); };
    const double a = std::exp(log_a_);
    const double b = std::exp(log_b_);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs(k);
    std::vector<double> col(m_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double row = 0.0;
      for (std::size_t j = 0; j < m_; ++j) {
        const double t = std::exp(f_[i] + scaled_(i, j) + g_[j]);
        row += t;
        col[j] += t;
        if (j + 1 < m_) h(ii, gi(j)) = h(gi(j), ii) = t;
      }
      h(ii, ii) = row;
      rhs(ii) = a - row;
    }
    for (std::size_t j = 0; j + 1 < m_; ++j) {
      h(gi(j), gi(j)) = col[j];
      rhs(gi(j)) = b - col[j];
    }
    h.diagonal().array() += 1e-15 * h.diagonal().maxCoeff();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    const Eigen::VectorXd step_dir = ldlt.solve(rhs);
    const bool solved = ldlt.info() == Eigen::Success && step_dir.allFinite();

    const std::vector<double> f0 = f_, g0 = g_;
    const double base_residual = sweep();
    if (!solved) return base_residual;
    const double base_dual = dual();
    const std::vector<double> fs = f_, gs = g_;
    const double slack = 1e-12 * (1.0 + std::abs(base_dual));

    for (double step = 1.0; step >= 1.0 / 64; step /= 4) {
      for (std::size_t i = 0; i < n_; ++i) f_[i] = f0[i] + step * step_dir(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j + 1 < m_; ++j) g_[j] = g0[j] + step * step_dir(gi(j));
      g_[m_ - 1] = g0[m_ - 1];
      if (!all_finite(f_) || !all_finite(g_)) continue;
      const double r = sweep_unchecked();
      const double d = dual();
      if (std::isfinite(r) && std::isfinite(d) &&
          (d > base_dual + slack || (d >= base_dual - slack && r < base_residual))) {
        return r;
      }
    }
    f_ = fs;
    g_ = gs;
    return base_residual;
  }

  void write_plan(Matrix& out) const {
    out = Matrix(n_, m_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) out(i, j) = std::exp(f_[i] + scaled_(i, j) + g_[j]);
    }
  }

 private:
  static bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  }

  std::size_t n_, m_;
  const Matrix& cost_;
  std::vector<double>& f_;
  std::vector<double>& g_;
  double log_a_, log_b_;
  Matrix scaled_;
  std::vector<double> row_buf_, col_buf_;
};

// Sweeps without progress before Newton steps are interleaved.
constexpr std::size_t kPlainSweeps = 20;
// Iteration cap for each warm-up stage of the lambda continuation.
constexpr std::size_t kStageSweeps = 100;

// Sweeps at the requested lambda until the residual is within tolerance or
// the budget runs out. After kPlainSweeps plain sweeps every sweep is preceded
// by a Newton step on the dual.
void finish(LogPotentials& pot, const SinkhornConfig& cfg, std::size_t plain_done,
            TransportPlan& plan) {
  std::size_t sweeps = plain_done;
  while (plan.iterations < cfg.max_iterations) {
    ++plan.iterations;
    ++sweeps;
    const double residual = sweeps > kPlainSweeps ? pot.newton_or_sweep() : pot.sweep();
    if (residual <= cfg.tolerance) {
      plan.converged = true;
      return;
    }
  }
}

// u <- a / (K v), v <- b / (K^T u) on the kernel itself. If kPlainSweeps
// sweeps do not converge, the scalings move to the log domain as potentials
// and finish() takes over.
TransportPlan sinkhorn_direct(const Matrix& cost, const SinkhornConfig& cfg) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);

  Matrix kernel(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) kernel(i, j) = std::exp(-cfg.lambda * cost(i, j));
  }

  std::vector<double> u(n, 1.0), v(m, 1.0);
  TransportPlan plan;
  const std::size_t plain = std::min(kPlainSweeps, cfg.max_iterations);
  while (plan.iterations < plain) {
    for (std::size_t i = 0; i < n; ++i) {
      double kv = 0.0;
      for (std::size_t j = 0; j < m; ++j) kv += kernel(i, j) * v[j];
      u[i] = a / kv;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double ktu = 0.0;
      for (std::size_t i = 0; i < n; ++i) ktu += kernel(i, j) * u[i];
      v[j] = b / ktu;
    }
    // Columns are exact after the v update; rows carry the residual.
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) row += kernel(i, j) * v[j];
      worst = std::max(worst, std::abs(u[i] * row - a));
    }
    ++plan.iterations;
    if (!std::isfinite(worst)) {
      throw NumericError("sinkhorn: scaling vectors left the floating-point range");
    }
    if (worst <= cfg.tolerance) {
      plan.converged = true;
      break;
    }
  }

  if (!plan.converged && plan.iterations < cfg.max_iterations) {
    std::vector<double> f(n), g(m);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::log(u[i]);
    for (std::size_t j = 0; j < m; ++j) g[j] = std::log(v[j]);
    LogPotentials pot(cost, f, g);
    pot.set_lambda(cfg.lambda);
    finish(pot, cfg, plan.iterations, plan);
    pot.write_plan(plan.entries);
    return plan;
  }

  plan.entries = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) plan.entries(i, j) = u[i] * kernel(i, j) * v[j];
  }
  return plan;
}

// Log-domain Sinkhorn. With lambda * max(M) large, the scaling updates are
// first run at lambda / 2^k and lambda is doubled between stages, carrying
// the potentials over. At the requested lambda, plain sweeps are tried first;
// if they have not converged, every sweep is preceded by a Newton step on the
// dual. All of this moves toward the same fixed point T = diag(u) K diag(v).
TransportPlan sinkhorn_log(const Matrix& cost, const SinkhornConfig& cfg) {
  const double scale = cost.max_abs();
  std::vector<double> stages{cfg.lambda};
  while (stages.back() * scale > kLogDomainThreshold) stages.push_back(stages.back() / 2.0);
  std::reverse(stages.begin(), stages.end());

  std::vector<double> f(cost.rows(), 0.0), g(cost.cols(), 0.0);
  LogPotentials pot(cost, f, g);
  TransportPlan plan;
  plan.log_domain = true;
  for (std::size_t s = 0; s + 1 < stages.size(); ++s) {
    pot.set_lambda(stages[s]);
    for (std::size_t it = 0; it < kStageSweeps && plan.iterations + 1 < cfg.max_iterations; ++it) {
      ++plan.iterations;
      if (pot.sweep() <= cfg.tolerance) break;
    }
    for (double& v : g) v *= 2.0;
  }

  pot.set_lambda(cfg.lambda);
  finish(pot, cfg, 0, plan);
  pot.write_plan(plan.entries);
  return plan;
}

}  // namespace

TransportPlan sinkhorn(const CostMatrix& cost, const SinkhornConfig& cfg) {
  cfg.validate();
  if (cost.rows() == 0 || cost.cols() == 0) {
    throw ShapeError("sinkhorn: empty cost matrix");
  }
  if (!cost.values.all_finite()) {
    throw NumericError("sinkhorn: cost matrix has non-finite entries");
  }

  bool use_log = cfg.domain == SinkhornDomain::kLog;
  if (cfg.domain == SinkhornDomain::kAuto) {
    use_log = cfg.lambda * cost.values.max_abs() > kLogDomainThreshold;
  }
  TransportPlan plan = use_log ? sinkhorn_log(cost.values, cfg)
                               : sinkhorn_direct(cost.values, cfg);
  plan.marginal_violation = marginal_violation(plan.entries);
  return plan;
}

GwdResult gwd(const EmbeddingMatrix& source, const EmbeddingMatrix& target,
              const SinkhornConfig& cfg) {
  const CostMatrix m = cost_matrix(source, target);
  GwdResult r;
  r.plan = sinkhorn(m, cfg);
  r.distance = frobenius_dot(r.plan.entries, m.values);
  return r;
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const std::size_t n = cost.rows();
  if (cost.cols() != n) throw ShapeError("solve_assignment: cost must be square");
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Shortest augmenting paths with row/column potentials; index 0 is a
  // virtual column holding the row being inserted.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // match[col] = row, 1-based
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(row0 - 1, j - 1) - row_pot[row0] - col_pot[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

ExactResult exact_ot(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0 || m == 0) throw ShapeError("exact_ot: empty cost matrix");
  if (n * m > kExactOtMaxCells) {
    throw std::length_error("exact_ot: " + std::to_string(n) + "x" + std::to_string(m) +
                            " exceeds the " + std::to_string(kExactOtMaxCells) +
                            "-cell guard");
  }
  if (!cost.values.all_finite()) {
    throw NumericError("exact_ot: cost matrix has non-finite entries");
  }

  // Each source node becomes copies/n units of mass 1/copies, likewise for
  // targets; an optimal vertex of the expanded problem is a permutation.
  const std::size_t copies = std::lcm(n, m);
  const std::size_t per_row = copies / n;
  const std::size_t per_col = copies / m;
  Matrix expanded(copies, copies);
  for (std::size_t p = 0; p < copies; ++p) {
    for (std::size_t q = 0; q < copies; ++q) {
      expanded(p, q) = cost.values(p / per_row, q / per_col);
    }
  }
  const auto assignment = solve_assignment(expanded);

  ExactResult r;
  r.plan.entries = Matrix(n, m);
  const double unit = 1.0 / static_cast<double>(copies);
  double total = 0.0;
  for (std::size_t p = 0; p < copies; ++p) {
    const std::size_t i = p / per_row;
    const std::size_t j = assignment[p] / per_col;
    r.plan.entries(i, j) += unit;
    total += cost.values(i, j);
  }
  r.cost = total * unit;
  r.plan.converged = true;
  r.plan.marginal_violation = marginal_violation(r.plan.entries);
  return r;
}

GwdGradient gwd_gradient(const EmbeddingMatrix& source,
                         const EmbeddingMatrix& target,
                         const TransportPlan& plan) {
  if (source.dim() != target.dim()) {
    throw ShapeError("gwd_gradient: embedding dimensions differ");
  }
  if (plan.entries.rows() != source.rows() || plan.entries.cols() != target.rows()) {
    throw ShapeError("gwd_gradient: plan is " + std::to_string(plan.entries.rows()) +
                     "x" + std::to_string(plan.entries.cols()) + ", embeddings are " +
                     std::to_string(source.rows()) + " and " +
                     std::to_string(target.rows()) + " rows");
  }
  const std::size_t d = source.dim();
  GwdGradient grad{Matrix(source.rows(), d), Matrix(target.rows(), d)};
  for (std::size_t i = 0; i < source.rows(); ++i) {
    auto x = source.values.row(i);
    for (std::size_t j = 0; j < target.rows(); ++j) {
      auto y = target.values.row(j);
      const double t = plan.entries(i, j);
      for (std::size_t c = 0; c < d; ++c) {
        const double g = 2.0 * t * (x[c] - y[c]);
        grad.source(i, c) += g;
        grad.target(j, c) -= g;
      }
    }
  }
  return grad;
}

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

void write_plan_csv(std::ostream& out, const Matrix& plan,
                    const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids) {
  if (row_ids.size() != plan.rows() || col_ids.size() != plan.cols()) {
    throw ShapeError("write_plan_csv: id count does not match plan shape");
  }
  out << "source";
  for (const auto& id : col_ids) out << ',' << csv_field(id);
  out << '\n';
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    out << csv_field(row_ids[i]);
    for (std::size_t j = 0; j < plan.cols(); ++j) out << ',' << format_double(plan(i, j));
    out << '\n';
  }
}

LabeledMatrix read_plan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("plan csv: empty input");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ParseError("plan csv: header needs at least one column");
  LabeledMatrix lm;
  lm.col_ids.assign(header.begin() + 1, header.end());
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("plan csv: row " + std::to_string(lm.row_ids.size() + 1) +
                       " has " + std::to_string(fields.size()) + " fields");
    }
    lm.row_ids.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      try {
        values.push_back(std::stod(fields[k]));
      } catch (const std::exception&) {
        throw ParseError("plan csv: bad number \"" + fields[k] + "\"");
      }
    }
  }
  lm.values = Matrix(lm.row_ids.size(), lm.col_ids.size());
  std::copy(values.begin(), values.end(), lm.values.data().begin());
  return lm;
}

}  // namespace sgwd
