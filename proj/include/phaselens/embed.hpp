#pragma once

// Trajectory matrices: Hankel (lagged-window) embedding of a scalar series and
// direct use of a space-time snapshot field.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phaselens/error.hpp"
#include "phaselens/kdv.hpp"
#include "phaselens/matrix.hpp"

namespace phaselens::embed {

struct TimeSeries {
  std::vector<double> samples;
  double dt = 1.0;

  TimeSeries(std::vector<double> s, double step) : samples(std::move(s)), dt(step) {
    if (samples.size() < 4) {
      throw InvalidArgument("time series needs at least 4 samples, got " +
                            std::to_string(samples.size()));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time series dt must be positive");
  }

  std::size_t size() const noexcept { return samples.size(); }
};

enum class Kind { hankel, snapshot };

inline const char* to_string(Kind k) { return k == Kind::hankel ? "hankel" : "snapshot"; }

struct TrajectoryMatrix {
  Matrix entries;
  Kind kind = Kind::snapshot;

  /// Observation-per-row view used by PCA. A Hankel matrix stores one lag per row
  /// (L x K), so its lagged vectors are the columns and the view is the transpose.
  Matrix observations() const { return kind == Kind::hankel ? entries.transposed() : entries; }
};

inline bool window_in_range(std::size_t window, std::size_t n) {
  return window >= 2 && 2 * window <= n;
}

/// X(i, j) = samples[i + j], i < L, j < K = N - L + 1.
inline TrajectoryMatrix hankel_embed(const TimeSeries& series, std::size_t window) {
  const std::size_t n = series.size();
  if (!window_in_range(window, n)) {
    throw InvalidArgument("window length " + std::to_string(window) +
                          " out of range: need 2 <= L <= N/2 with N = " + std::to_string(n));
  }
  const std::size_t cols = n - window + 1;
  Matrix m(window, cols);
  for (std::size_t i = 0; i < window; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = series.samples[i + j];
  return {std::move(m), Kind::hankel};
}

/// Stride spreading `rows` picks evenly from the first to (near) the last snapshot.
inline std::size_t even_stride(std::size_t total, std::size_t rows) {
  if (rows < 2 || total < rows) {
    throw InvalidArgument("snapshot embedding: cannot take " + std::to_string(rows) +
                          " rows from " + std::to_string(total) + " snapshots");
  }
  return (total - 1) / (rows - 1);
}

/// Rows 0, stride, 2*stride, ... of the field; default stride spreads over the run.
inline TrajectoryMatrix snapshot_embed(const kdv::FieldSnapshots& field, std::size_t rows,
                                       std::optional<std::size_t> stride = std::nullopt) {
  const std::size_t total = field.snapshot_count();
  if (rows < 2) throw InvalidArgument("snapshot embedding needs at least 2 rows");
  const std::size_t step = stride ? *stride : even_stride(total, rows);
  if (total == 0 || step == 0 || (rows - 1) * step > total - 1) {
    throw InvalidArgument("insufficient snapshots: " + std::to_string(rows) + " rows at stride " +
                          std::to_string(step) + " need " +
                          std::to_string((rows - 1) * step + 1) + ", have " +
                          std::to_string(total));
  }
  Matrix m(rows, field.values.cols());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto src = field.values.row(i * step);
    auto dst = m.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j];
  }
  return {std::move(m), Kind::snapshot};
}

/// Inverse of hankel_embed: first row followed by the tail of the last column.
inline std::vector<double> hankel_series(const TrajectoryMatrix& x) {
  if (x.kind != Kind::hankel) throw InvalidArgument("hankel_series: not a Hankel matrix");
  const Matrix& m = x.entries;
  std::vector<double> out(m.row(0).begin(), m.row(0).end());
  for (std::size_t i = 1; i < m.rows(); ++i) out.push_back(m(i, m.cols() - 1));
  return out;
}

}  // namespace phaselens::embed
