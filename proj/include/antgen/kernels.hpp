#pragma once

// Dense numeric kernels. Every kernel exists twice: a straight-line serial
// reference (kept for testing) and an OpenMP version used by the library.
// The parallel versions split work over output rows only, so each output
// element is produced by one thread with a fixed summation order and results
// do not depend on the thread count.

#include <cstddef>

#include "antgen/matrix.hpp"

namespace antgen::kernels {

enum class Op { none, transpose };

namespace serial {

// c = alpha * op(a) * op(b) + beta * c
void gemm(Op op_a, Op op_b, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c);

// out(i, j) = exp(-gamma * |x_i - x_j|^2)
void rbf_gram(const Matrix& x, double gamma, Matrix& out);

// out(i, j) = <x_i, x_j>
void linear_gram(const Matrix& x, Matrix& out);

}  // namespace serial

namespace parallel {

void gemm(Op op_a, Op op_b, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c);
void rbf_gram(const Matrix& x, double gamma, Matrix& out);
void linear_gram(const Matrix& x, Matrix& out);

}  // namespace parallel

// Library entry points; forward to the parallel kernels.
inline void gemm(Op op_a, Op op_b, double alpha, const Matrix& a, const Matrix& b, double beta,
                 Matrix& c) {
  parallel::gemm(op_a, op_b, alpha, a, b, beta, c);
}
inline void rbf_gram(const Matrix& x, double gamma, Matrix& out) {
  parallel::rbf_gram(x, gamma, out);
}
inline void linear_gram(const Matrix& x, Matrix& out) { parallel::linear_gram(x, out); }

void set_num_threads(int n);
int num_threads();

}  // namespace antgen::kernels
