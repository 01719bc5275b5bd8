#include <cmath>
#include <stdexcept>

#include "antgen/kernels.hpp"

namespace antgen::kernels {

namespace detail {

std::size_t op_rows(Op op, const Matrix& m) { return op == Op::none ? m.rows() : m.cols(); }
std::size_t op_cols(Op op, const Matrix& m) { return op == Op::none ? m.cols() : m.rows(); }

void check_gemm_shapes(Op op_a, Op op_b, const Matrix& a, const Matrix& b, const Matrix& c) {
  if (op_cols(op_a, a) != op_rows(op_b, b) || c.rows() != op_rows(op_a, a) ||
      c.cols() != op_cols(op_b, b)) {
    throw std::invalid_argument("gemm: shape mismatch");
  }
}

}  // namespace detail

namespace serial {

void gemm(Op op_a, Op op_b, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c) {
  detail::check_gemm_shapes(op_a, op_b, a, b, c);
  const std::size_t m = c.rows(), n = c.cols(), k = detail::op_cols(op_a, a);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = op_a == Op::none ? a(i, p) : a(p, i);
        const double bv = op_b == Op::none ? b(p, j) : b(j, p);
        s += av * bv;
      }
      c(i, j) = alpha * s + (beta == 0.0 ? 0.0 : beta * c(i, j));
    }
  }
}

void rbf_gram(const Matrix& x, double gamma, Matrix& out) {
  const std::size_t n = x.rows();
  out.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t p = 0; p < x.cols(); ++p) {
        const double d = x(i, p) - x(j, p);
        d2 += d * d;
      }
      out(i, j) = std::exp(-gamma * d2);
    }
  }
}

void linear_gram(const Matrix& x, Matrix& out) {
  const std::size_t n = x.rows();
  out.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < x.cols(); ++p) s += x(i, p) * x(j, p);
      out(i, j) = s;
    }
}

}  // namespace serial
}  // namespace antgen::kernels
