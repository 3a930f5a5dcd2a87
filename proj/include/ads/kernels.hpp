#pragma once

#include <cstddef>
#include <span>

namespace ads::kernels {

// Serial is the reference path; Parallel splits the outer loop with
// OpenMP and must produce bit-identical results.
enum class Execution { Serial, Parallel };

// out[i] = sum over numeric columns of (row_i - q)^2 plus the number of
// categorical columns where row_i != q. rows is row-major, n x width.
void mixed_sq_distances(std::span<const double> rows, std::size_t width, std::span<const char> categorical,
                        std::span<const double> query, std::span<double> out,
                        Execution exec = Execution::Parallel);

// Same distance for many queries at once: out is n_queries x n_rows.
void mixed_sq_distance_matrix(std::span<const double> rows, std::size_t width,
                              std::span<const char> categorical, std::span<const double> queries,
                              std::span<double> out, Execution exec = Execution::Parallel);

// Number of worker threads the parallel path will use.
int max_threads();

}  // namespace ads::kernels
