#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nearflow/errors.hpp"
#include "nearflow/util.hpp"

namespace nearflow {

/// Processes of the probabilistic layer: standard Brownian motion, the
/// two-valued sign process with |X_t| = sqrt(t), and Z = Y * X with the sign
/// process X and an independent factor Y with E Y^2 = 1.
enum class ProcessKind { brownian, sign_q_minus_1, scaled };
enum class YLaw { rademacher, gaussian };

struct SimConfig {
  ProcessKind kind = ProcessKind::brownian;
  YLaw y_law = YLaw::rademacher;  // used by scaled only
  std::vector<double> grid;       // strictly increasing, first point > 0
  long paths = 0;                 // N >= 1000
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Column-major path matrix: column j holds all paths at grid point j.
struct PathMatrix {
  std::vector<double> data;
  long n_paths = 0;
  std::vector<double> grid;

  double at(long path, std::size_t t) const { return data[t * static_cast<std::size_t>(n_paths) + path]; }
  double* col(std::size_t t) { return data.data() + t * static_cast<std::size_t>(n_paths); }
  const double* col(std::size_t t) const { return data.data() + t * static_cast<std::size_t>(n_paths); }

  std::size_t time_index(double t) const {
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (grid[j] == t) return j;
    throw DomainError("requested time is not on the simulation grid");
  }
};

namespace detail {

constexpr long kChunkPaths = 4096;

inline void validate(const SimConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("empty time grid");
  double prev = 0.0;
  for (double t : cfg.grid) {
    if (!(t > prev)) throw ConfigError("grid must be strictly increasing and positive");
    prev = t;
  }
  if (cfg.paths < 1000) throw ConfigError("need at least 1000 paths");
}

// One RNG stream per fixed-size path chunk, derived from (seed, chunk); the
// assembled matrix is identical for any worker count.
template <typename Body>
void run_chunked(const SimConfig& cfg, PathMatrix& out, Body body) {
  const long n = cfg.paths;
  const std::size_t chunks = static_cast<std::size_t>((n + kChunkPaths - 1) / kChunkPaths);
  parallel_chunks(chunks, cfg.workers <= 0 ? 1 : cfg.workers, [&](unsigned, std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      // seed_seq consumes 32-bit words; feed both halves of seed and chunk.
      std::seed_seq ss{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                       static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                       std::uint32_t{0x6e66af01u}};
      std::mt19937_64 eng(ss);
      const long begin = static_cast<long>(c) * kChunkPaths;
      const long end = std::min(n, begin + kChunkPaths);
      body(eng, begin, end, out);
    }
  });
}

}  // namespace detail

/// Simulates the configured process at the grid times. Deterministic for a
/// fixed (seed, grid, paths) regardless of the worker count.
inline PathMatrix simulate(const SimConfig& cfg) {
  detail::validate(cfg);
  PathMatrix m;
  m.n_paths = cfg.paths;
  m.grid = cfg.grid;
  m.data.assign(cfg.grid.size() * static_cast<std::size_t>(cfg.paths), 0.0);
  const std::size_t nt = cfg.grid.size();

  switch (cfg.kind) {
    case ProcessKind::brownian:
      detail::run_chunked(cfg, m, [&](std::mt19937_64& eng, long lo, long hi, PathMatrix& out) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (long i = lo; i < hi; ++i) {
          double x = 0.0, tprev = 0.0;
          for (std::size_t j = 0; j < nt; ++j) {
            x += std::sqrt(cfg.grid[j] - tprev) * gauss(eng);
            tprev = cfg.grid[j];
            out.col(j)[i] = x;
          }
        }
      });
      break;
    case ProcessKind::sign_q_minus_1:
    case ProcessKind::scaled:
      detail::run_chunked(cfg, m, [&](std::mt19937_64& eng, long lo, long hi, PathMatrix& out) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const bool scaled = cfg.kind == ProcessKind::scaled;
        for (long i = lo; i < hi; ++i) {
          double y = 1.0;
          if (scaled) y = cfg.y_law == YLaw::gaussian ? gauss(eng) : (unif(eng) < 0.5 ? -1.0 : 1.0);
          // Two-valued chain xi with stay probability (1 + sqrt(s/t))/2
          // between consecutive grid times, so that E xi_s xi_t = sqrt(s/t).
          double xi = unif(eng) < 0.5 ? -1.0 : 1.0;
          double tprev = cfg.grid[0];
          out.col(0)[i] = y * std::sqrt(cfg.grid[0]) * xi;
          for (std::size_t j = 1; j < nt; ++j) {
            const double stay = 0.5 * (1.0 + std::sqrt(tprev / cfg.grid[j]));
            if (unif(eng) >= stay) xi = -xi;
            tprev = cfg.grid[j];
            out.col(j)[i] = y * std::sqrt(cfg.grid[j]) * xi;
          }
        }
      });
      break;
  }
  return m;
}

/// Regression designs. `quadratic` regresses X_s^2 on {X_r^2, X_r X_u, X_u^2,
/// X_r, X_u, 1}; `quadratic_variance` regresses the squared residual of the
/// linear fit on the same design, estimating the conditional-variance table.
enum class RegressionBasis { linear, quadratic, one_sided_quadratic, quadratic_variance };

struct RegressionEstimate {
  RegressionBasis basis;
  std::vector<std::string> names;
  Eigen::VectorXd coef;   // minimum-norm least squares
  Eigen::MatrixXd cov;    // heteroskedasticity-robust, pseudoinverse-based
  int rank = 0;
  bool rank_deficient = false;
  long n = 0;

  double se(int j) const { return std::sqrt(std::max(0.0, cov(j, j))); }
};

namespace detail {

struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

inline RegressionEstimate solve_ols(RegressionBasis basis, Design d) {
  const long n = d.X.rows();
  const int k = static_cast<int>(d.X.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double tol = smax * 1e-9;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(k);
  int rank = 0;
  for (int i = 0; i < k; ++i) {
    if (svd.singularValues()(i) > tol) {
      inv_sv(i) = 1.0 / svd.singularValues()(i);
      ++rank;
    }
  }
  const Eigen::MatrixXd& v = svd.matrixV();
  RegressionEstimate est;
  est.basis = basis;
  est.names = std::move(d.names);
  est.coef = v * (inv_sv.asDiagonal() * (svd.matrixU().transpose() * d.y));
  const Eigen::VectorXd resid = d.y - d.X * est.coef;
  // (X'X)^+ X' diag(e^2) X (X'X)^+ via the same SVD factors.
  const Eigen::MatrixXd xtx_pinv =
      v * (inv_sv.array().square().matrix().asDiagonal() * v.transpose());
  const Eigen::MatrixXd weighted = d.X.array().colwise() * resid.array().square();
  const Eigen::MatrixXd meat = d.X.transpose() * weighted.matrix();
  est.cov = xtx_pinv * meat * xtx_pinv;
  est.rank = rank;
  est.rank_deficient = rank < k;
  est.n = n;
  return est;
}

inline Design linear_design(const PathMatrix& m, double r, double s, double u) {
  const long n = m.n_paths;
  const auto ir = m.time_index(r), is = m.time_index(s), iu = m.time_index(u);
  Design d;
  d.X.resize(n, 2);
  d.y.resize(n);
  for (long i = 0; i < n; ++i) {
    d.X(i, 0) = m.at(i, ir);
    d.X(i, 1) = m.at(i, iu);
    d.y(i) = m.at(i, is);
  }
  d.names = {"X_r", "X_u"};
  return d;
}

inline Design quadratic_design(const PathMatrix& m, double r, double s, double u) {
  const long n = m.n_paths;
  const auto ir = m.time_index(r), is = m.time_index(s), iu = m.time_index(u);
  Design d;
  d.X.resize(n, 6);
  d.y.resize(n);
  for (long i = 0; i < n; ++i) {
    const double xr = m.at(i, ir), xu = m.at(i, iu), xs = m.at(i, is);
    d.X(i, 0) = xr * xr;
    d.X(i, 1) = xr * xu;
    d.X(i, 2) = xu * xu;
    d.X(i, 3) = xr;
    d.X(i, 4) = xu;
    d.X(i, 5) = 1.0;
    d.y(i) = xs * xs;
  }
  d.names = {"X_r^2", "X_rX_u", "X_u^2", "X_r", "X_u", "1"};
  return d;
}

}  // namespace detail

/// Ordinary least squares of the basis target on the declared design, with
/// robust standard errors. Exactly collinear designs (the sign process makes
/// X_r^2, X_u^2, 1 proportional) are solved in the minimum-norm sense and
/// flagged rank_deficient rather than thrown.
inline RegressionEstimate estimate_regression(const PathMatrix& m, RegressionBasis basis,
                                              const std::vector<double>& times) {
  if (m.n_paths < 1000) throw ConfigError("need at least 1000 paths");
  switch (basis) {
    case RegressionBasis::linear: {
      if (times.size() != 3) throw DomainError("linear basis needs times (r, s, u)");
      return detail::solve_ols(basis, detail::linear_design(m, times[0], times[1], times[2]));
    }
    case RegressionBasis::quadratic: {
      if (times.size() != 3) throw DomainError("quadratic basis needs times (r, s, u)");
      return detail::solve_ols(basis, detail::quadratic_design(m, times[0], times[1], times[2]));
    }
    case RegressionBasis::quadratic_variance: {
      if (times.size() != 3) throw DomainError("quadratic_variance basis needs times (r, s, u)");
      auto lin = detail::solve_ols(RegressionBasis::linear,
                                   detail::linear_design(m, times[0], times[1], times[2]));
      auto d = detail::quadratic_design(m, times[0], times[1], times[2]);
      const auto ir = m.time_index(times[0]), is = m.time_index(times[1]), iu = m.time_index(times[2]);
      for (long i = 0; i < m.n_paths; ++i) {
        const double e = m.at(i, is) - lin.coef(0) * m.at(i, ir) - lin.coef(1) * m.at(i, iu);
        d.y(i) = e * e;
      }
      return detail::solve_ols(basis, std::move(d));
    }
    case RegressionBasis::one_sided_quadratic: {
      if (times.size() != 2) throw DomainError("one_sided_quadratic basis needs times (s, t)");
      const long n = m.n_paths;
      const auto is = m.time_index(times[0]), it = m.time_index(times[1]);
      detail::Design d;
      d.X.resize(n, 3);
      d.y.resize(n);
      for (long i = 0; i < n; ++i) {
        const double xs = m.at(i, is), xt = m.at(i, it);
        d.X(i, 0) = xs * xs;
        d.X(i, 1) = xs;
        d.X(i, 2) = 1.0;
        d.y(i) = xt * xt;
      }
      d.names = {"X_s^2", "X_s", "1"};
      return detail::solve_ols(basis, std::move(d));
    }
  }
  throw ConfigError("unknown regression basis");
}

struct McCheck {
  std::string name;
  double estimate = 0, theory = 0, se = 0, z = 0;
  bool pass = false;
};

struct McReport {
  std::vector<McCheck> rows;
  bool pass = true;
};

/// Passes iff every coefficient lies within k robust standard errors of the
/// theoretical value; the report carries per-coefficient z-scores.
inline McReport mc_compare(const RegressionEstimate& est, const std::vector<double>& theory,
                           double k_sigma) {
  if (theory.size() != static_cast<std::size_t>(est.coef.size()))
    throw DomainError("theory vector length does not match the basis");
  McReport rep;
  for (int j = 0; j < est.coef.size(); ++j) {
    McCheck c;
    c.name = est.names[j];
    c.estimate = est.coef(j);
    c.theory = theory[j];
    c.se = est.se(j);
    c.z = c.se > 0 ? std::abs(c.estimate - c.theory) / c.se : (c.estimate == c.theory ? 0.0 : INFINITY);
    c.pass = c.z <= k_sigma;
    rep.rows.push_back(c);
    rep.pass = rep.pass && c.pass;
  }
  return rep;
}

/// Same comparison for linear functionals L * coef of the table; this is the
/// honest comparison when the design is rank deficient, restricted to
/// functionals that are estimable for every process involved.
inline McReport mc_compare_functionals(const RegressionEstimate& est, const Eigen::MatrixXd& lmap,
                                       const std::vector<std::string>& names,
                                       const std::vector<double>& theory, double k_sigma) {
  if (lmap.cols() != est.coef.size() || lmap.rows() != static_cast<long>(theory.size()))
    throw DomainError("functional map has wrong shape");
  const Eigen::VectorXd vals = lmap * est.coef;
  const Eigen::MatrixXd vcov = lmap * est.cov * lmap.transpose();
  McReport rep;
  for (long j = 0; j < vals.size(); ++j) {
    McCheck c;
    c.name = names[static_cast<std::size_t>(j)];
    c.estimate = vals(j);
    c.theory = theory[static_cast<std::size_t>(j)];
    c.se = std::sqrt(std::max(0.0, vcov(j, j)));
    c.z = c.se > 0 ? std::abs(c.estimate - c.theory) / c.se : (c.estimate == c.theory ? 0.0 : INFINITY);
    c.pass = c.z <= k_sigma;
    rep.rows.push_back(c);
    rep.pass = rep.pass && c.pass;
  }
  return rep;
}

struct MomentEstimate {
  double mean = 0, se = 0;
  long n = 0;
};

/// Sample mean and standard error of X_{t_index}^power over all paths.
inline MomentEstimate sample_moment(const PathMatrix& m, std::size_t t_index, int power) {
  const long n = m.n_paths;
  double sum = 0, sumsq = 0;
  for (long i = 0; i < n; ++i) {
    double v = 1.0;
    const double x = m.at(i, t_index);
    for (int p = 0; p < power; ++p) v *= x;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

/// Sample mean and standard error of X_{i} X_{j} (covariance estimate for
/// centered processes).
inline MomentEstimate sample_product_moment(const PathMatrix& m, std::size_t i_index, std::size_t j_index) {
  const long n = m.n_paths;
  double sum = 0, sumsq = 0;
  for (long i = 0; i < n; ++i) {
    const double v = m.at(i, i_index) * m.at(i, j_index);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

inline double two_sample_z(const MomentEstimate& a, const MomentEstimate& b) {
  return std::abs(a.mean - b.mean) / std::sqrt(a.se * a.se + b.se * b.se);
}

}  // namespace nearflow
