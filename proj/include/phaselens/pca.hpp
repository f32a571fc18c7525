#pragma once

// Covariance, Jacobi SVD / eigendecomposition, component selection and projection.
//
// Rows are observations, columns are variables. Covariance uses the n - 1 divisor.
// Singular vectors are sign-normalized so that the largest-magnitude entry of each
// right vector is positive; equal singular values keep their original order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phaselens/embed.hpp"
#include "phaselens/error.hpp"
#include "phaselens/matrix.hpp"

namespace phaselens::pca {

inline constexpr int kMaxSweeps = 100;

inline Matrix center_columns(const Matrix& x) {
  Matrix z = x;
  if (x.rows() == 0) return z;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) z(i, j) -= mean;
  }
  return z;
}

/// Sample covariance of the columns of `obs` (n - 1 divisor).
inline Matrix covariance(const Matrix& obs, bool center = true) {
  if (obs.rows() < 2) {
    throw InvalidArgument("covariance: insufficient observations (" +
                          std::to_string(obs.rows()) + " rows, need >= 2)");
  }
  if (obs.cols() == 0) throw InvalidArgument("covariance: no variables");
  const Matrix z = center ? center_columns(obs) : obs;
  const std::size_t p = z.cols();
  const double denom = static_cast<double>(z.rows() - 1);
  Matrix c(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < z.rows(); ++i) s += z(i, a) * z(i, b);
      c(a, b) = s / denom;
      c(b, a) = c(a, b);
    }
  return c;
}

inline Matrix covariance(const embed::TrajectoryMatrix& x, bool center = true) {
  return covariance(x.observations(), center);
}

/// M = left * diag(singular_values) * right^T, left m x m, right n x n.
struct SvdResult {
  std::vector<double> singular_values;
  Matrix left;
  Matrix right;
};

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

namespace detail {

inline void rotate_columns(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double mp = m(i, p);
    const double mq = m(i, q);
    m(i, p) = c * mp - s * mq;
    m(i, q) = s * mp + c * mq;
  }
}

inline std::size_t largest_magnitude_index(const Matrix& m, std::size_t col) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < m.rows(); ++i)
    if (std::fabs(m(i, col)) > std::fabs(m(best, col))) best = i;
  return best;
}

inline void flip_column(Matrix& m, std::size_t col) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, col) = -m(i, col);
}

// Fill columns flagged in `missing` with an orthonormal completion of the rest,
// taking at each step the standard basis vector with the largest residual.
inline void complete_basis(Matrix& q, std::vector<bool> missing) {
  const std::size_t n = q.rows();
  const auto residual = [&](std::size_t axis) {
    std::vector<double> v(n, 0.0);
    v[axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t other = 0; other < q.cols(); ++other) {
        if (missing[other]) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, other) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q(i, other);
      }
    }
    return v;
  };
  for (std::size_t col = 0; col < q.cols(); ++col) {
    if (!missing[col]) continue;
    std::vector<double> best;
    double best_norm = 0.0;
    for (std::size_t axis = 0; axis < n; ++axis) {
      auto v = residual(axis);
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best = std::move(v);
      }
    }
    if (best_norm < 1e-6) throw NumericalError("svd", "basis completion failed");
    for (std::size_t i = 0; i < n; ++i) q(i, col) = best[i] / best_norm;
    missing[col] = false;
  }
}

// One-sided (Hestenes) Jacobi for rows >= cols. Returns unsorted values.
inline SvdResult hestenes(Matrix u) {
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  Matrix v = Matrix::identity(n);
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(m, 4));

  bool converged = false;
  double worst = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0) continue;
        const double scale = std::sqrt(alpha * beta);
        const double rel = std::fabs(gamma) / scale;
        worst = std::max(worst, rel);
        if (rel <= tol) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate_columns(u, p, q, c, s);
        rotate_columns(v, p, q, c, s);
      }
    }
  }
  if (!converged) throw ConvergenceError("svd", worst);

  SvdResult out;
  out.singular_values.resize(n);
  out.left = Matrix(m, m);
  std::vector<bool> missing(m, true);
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += u(i, j) * u(i, j);
    norm = std::sqrt(norm);
    out.singular_values[j] = norm;
    if (norm > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.left(i, j) = u(i, j) / norm;
      missing[j] = false;
    }
  }
  complete_basis(out.left, missing);
  out.right = std::move(v);
  return out;
}

template <class T>
std::vector<std::size_t> descending_order(const std::vector<T>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

inline Matrix permute_leading_columns(const Matrix& m, const std::vector<std::size_t>& order) {
  Matrix out = m;
  for (std::size_t j = 0; j < order.size(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, order[j]);
  return out;
}

}  // namespace detail

inline SvdResult svd(const Matrix& m) {
  if (m.empty()) throw InvalidArgument("svd: empty matrix");
  if (!m.all_finite()) throw InvalidArgument("svd: non-finite entries");

  SvdResult raw;
  if (m.rows() >= m.cols()) {
    raw = detail::hestenes(m);
  } else {
    SvdResult t = detail::hestenes(m.transposed());
    raw.singular_values = std::move(t.singular_values);
    raw.left = std::move(t.right);
    raw.right = std::move(t.left);
  }

  const auto order = detail::descending_order(raw.singular_values);
  SvdResult out;
  out.singular_values.reserve(order.size());
  for (std::size_t j : order) out.singular_values.push_back(raw.singular_values[j]);
  out.left = detail::permute_leading_columns(raw.left, order);
  out.right = detail::permute_leading_columns(raw.right, order);

  const std::size_t p = order.size();
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t i = detail::largest_magnitude_index(out.right, j);
    if (out.right(i, j) < 0.0) {
      detail::flip_column(out.right, j);
      detail::flip_column(out.left, j);
    }
  }
  for (Matrix* q : {&out.left, &out.right}) {
    for (std::size_t j = p; j < q->cols(); ++j) {
      const std::size_t i = detail::largest_magnitude_index(*q, j);
      if ((*q)(i, j) < 0.0) detail::flip_column(*q, j);
    }
  }
  return out;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline EigenResult symmetric_eigen(const Matrix& sym) {
  const std::size_t n = sym.rows();
  if (n == 0 || sym.cols() != n) throw InvalidArgument("symmetric_eigen: matrix must be square");
  if (!sym.all_finite()) throw InvalidArgument("symmetric_eigen: non-finite entries");

  Matrix a = sym;
  Matrix v = Matrix::identity(n);
  bool converged = false;
  double off = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        off = std::max(off, std::fabs(apq));
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double g = 100.0 * std::fabs(apq);
        if (std::fabs(app) + g == std::fabs(app) && std::fabs(aqq) + g == std::fabs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        converged = false;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        // A <- J^T A J with J the (p, q) rotation; columns then rows.
        detail::rotate_columns(a, p, q, c, s);
        for (std::size_t k = 0; k < n; ++k) {
          const double pk = a(p, k);
          const double qk = a(q, k);
          a(p, k) = c * pk - s * qk;
          a(q, k) = s * pk + c * qk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        detail::rotate_columns(v, p, q, c, s);
      }
    }
  }
  if (!converged) throw ConvergenceError("symmetric_eigen", off);

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = detail::descending_order(diag);
  EigenResult out;
  for (std::size_t j : order) out.values.push_back(diag[j]);
  out.vectors = detail::permute_leading_columns(v, order);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = detail::largest_magnitude_index(out.vectors, j);
    if (out.vectors(i, j) < 0.0) detail::flip_column(out.vectors, j);
  }
  return out;
}

/// sigma_i / sigma_0.
inline std::vector<double> normalized_spectrum(std::span<const double> singular_values) {
  if (singular_values.empty() || !(singular_values[0] > 0.0)) {
    throw NumericalError("pca", "degenerate spectrum (leading singular value is zero)");
  }
  std::vector<double> out(singular_values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = singular_values[i] / singular_values[0];
  return out;
}

inline std::vector<double> normalized_spectrum(const SvdResult& s) {
  return normalized_spectrum(s.singular_values);
}

struct FixedCount {
  std::size_t k;
};

/// Smallest k with sum_{i<k} sigma_i / sum_i sigma_i >= fraction.
struct EnergyThreshold {
  double fraction;
};

using SelectionRule = std::variant<FixedCount, EnergyThreshold>;

struct PcaProjection {
  Matrix projection;  // p x k, orthonormal columns
  std::size_t k = 0;
  double energy_captured = 0.0;
};

inline PcaProjection select_components(const SvdResult& s, const SelectionRule& rule) {
  const std::size_t p = s.singular_values.size();
  double total = 0.0;
  std::vector<double> cumulative(p);
  for (std::size_t i = 0; i < p; ++i) {
    total += s.singular_values[i];
    cumulative[i] = total;
  }

  std::size_t k = 0;
  if (const auto* fixed = std::get_if<FixedCount>(&rule)) {
    if (fixed->k < 1 || fixed->k > p) {
      throw InvalidArgument("k out of range: k = " + std::to_string(fixed->k) +
                            " but only " + std::to_string(p) + " components exist");
    }
    k = fixed->k;
  } else {
    const double fraction = std::get<EnergyThreshold>(rule).fraction;
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw InvalidArgument("energy threshold must lie in (0, 1]");
    }
    if (!(total > 0.0)) throw NumericalError("pca", "degenerate spectrum (all zero)");
    k = p;
    for (std::size_t i = 0; i < p; ++i) {
      if (cumulative[i] / total >= fraction) {
        k = i + 1;
        break;
      }
    }
  }

  PcaProjection out;
  out.k = k;
  out.energy_captured = total > 0.0 ? cumulative[k - 1] / total : 0.0;
  out.projection = Matrix(s.right.rows(), k);
  for (std::size_t i = 0; i < s.right.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) out.projection(i, j) = s.right(i, j);
  return out;
}

struct ReducedMatrix {
  Matrix entries;
  std::vector<std::string> names;
};

/// X' = X P; columns named prefix1..prefixk.
inline ReducedMatrix project(const Matrix& obs, const PcaProjection& p,
                             std::string_view prefix = "c") {
  if (obs.cols() != p.projection.rows()) {
    throw InvalidArgument("project: dimension mismatch, data has " + std::to_string(obs.cols()) +
                          " columns but projection expects " +
                          std::to_string(p.projection.rows()));
  }
  ReducedMatrix out{obs * p.projection, {}};
  for (std::size_t j = 0; j < p.k; ++j) out.names.push_back(std::string(prefix) + std::to_string(j + 1));
  return out;
}

inline ReducedMatrix project(const embed::TrajectoryMatrix& x, const PcaProjection& p,
                             std::string_view prefix = "c") {
  return project(x.observations(), p, prefix);
}

enum class Decompose { covariance, trajectory };

struct Options {
  SelectionRule rule = FixedCount{3};
  bool center = true;
  Decompose decompose = Decompose::covariance;
  bool project_centered = false;
  std::string prefix = "c";
};

struct Analysis {
  SvdResult decomposition;
  std::vector<double> spectrum;  // normalized
  PcaProjection projection;
  ReducedMatrix reduced;
};

/// SVD of the covariance matrix, or of the (centered) data itself.
inline SvdResult decompose(const Matrix& obs, bool center, Decompose how) {
  if (how == Decompose::covariance) return svd(covariance(obs, center));
  if (obs.rows() < 2) throw InvalidArgument("pca: insufficient observations");
  return svd(center ? center_columns(obs) : obs);
}

/// Decomposition, selection and projection over observation rows.
inline Analysis analyze(const Matrix& obs, const Options& opt) {
  Analysis out;
  out.decomposition = decompose(obs, opt.center, opt.decompose);
  out.spectrum = normalized_spectrum(out.decomposition);
  out.projection = select_components(out.decomposition, opt.rule);
  out.reduced = project(opt.project_centered ? center_columns(obs) : obs, out.projection, opt.prefix);
  return out;
}

inline Analysis analyze(const embed::TrajectoryMatrix& x, const Options& opt) {
  return analyze(x.observations(), opt);
}

}  // namespace phaselens::pca
