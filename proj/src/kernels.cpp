#include "ads/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ads::kernels {

namespace {

inline double row_distance(const double* row, std::size_t width, const char* categorical, const double* q) {
  double d = 0.0;
  for (std::size_t j = 0; j < width; ++j) {
    if (categorical[j]) {
      d += row[j] != q[j] ? 1.0 : 0.0;
    } else {
      const double diff = row[j] - q[j];
      d += diff * diff;
    }
  }
  return d;
}

}  // namespace

void mixed_sq_distances(std::span<const double> rows, std::size_t width, std::span<const char> categorical,
                        std::span<const double> query, std::span<double> out, Execution exec) {
  const auto n = static_cast<long>(out.size());
  const double* base = rows.data();
  const char* cat = categorical.data();
  const double* q = query.data();
  if (exec == Execution::Serial) {
    for (long i = 0; i < n; ++i) out[i] = row_distance(base + i * width, width, cat, q);
    return;
  }
#pragma omp parallel for schedule(static) if (n > 2048)
  for (long i = 0; i < n; ++i) out[i] = row_distance(base + i * width, width, cat, q);
}

void mixed_sq_distance_matrix(std::span<const double> rows, std::size_t width,
                              std::span<const char> categorical, std::span<const double> queries,
                              std::span<double> out, Execution exec) {
  const std::size_t n_rows = width ? rows.size() / width : 0;
  const auto n_queries = static_cast<long>(width ? queries.size() / width : 0);
  const double* base = rows.data();
  const char* cat = categorical.data();
  auto one = [&](long qi) {
    const double* q = queries.data() + qi * width;
    double* o = out.data() + qi * n_rows;
    for (std::size_t i = 0; i < n_rows; ++i) o[i] = row_distance(base + i * width, width, cat, q);
  };
  if (exec == Execution::Serial) {
    for (long qi = 0; qi < n_queries; ++qi) one(qi);
    return;
  }
#pragma omp parallel for schedule(dynamic, 8)
  for (long qi = 0; qi < n_queries; ++qi) one(qi);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ads::kernels
