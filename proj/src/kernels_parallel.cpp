#include <omp.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "antgen/kernels.hpp"

namespace antgen::kernels {

namespace detail {
std::size_t op_cols(Op op, const Matrix& m);
void check_gemm_shapes(Op op_a, Op op_b, const Matrix& a, const Matrix& b, const Matrix& c);
}  // namespace detail

namespace {

int g_threads = 0;  // 0: OpenMP default

int active_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

void scale_rows(Matrix& c, double beta) {
  if (beta == 1.0) return;
  if (beta == 0.0) {
    c.fill(0.0);
    return;
  }
  for (auto& v : c.values()) v *= beta;
}

}  // namespace

void set_num_threads(int n) { g_threads = n; }
int num_threads() { return active_threads(); }

namespace parallel {

void gemm(Op op_a, Op op_b, double alpha, const Matrix& a, const Matrix& b, double beta,
          Matrix& c) {
  detail::check_gemm_shapes(op_a, op_b, a, b, c);
  const std::int64_t m = static_cast<std::int64_t>(c.rows());
  const std::size_t n = c.cols();
  const std::size_t k = detail::op_cols(op_a, a);
  const bool par = m > 1 && m * n * k >= kParallelWork;
  const int threads = active_threads();

  if (op_b == Op::transpose) {
    // c(i, j) = sum_p op(a)(i, p) * b(j, p): contiguous dot products.
#pragma omp parallel for schedule(static) if (par) num_threads(threads)
    for (std::int64_t i = 0; i < m; ++i) {
      std::vector<double> arow;
      const double* ar;
      if (op_a == Op::none) {
        ar = a.row(static_cast<std::size_t>(i)).data();
      } else {
        arow.resize(k);
        for (std::size_t p = 0; p < k; ++p) arow[p] = a(p, static_cast<std::size_t>(i));
        ar = arow.data();
      }
      double* cr = c.row(static_cast<std::size_t>(i)).data();
      for (std::size_t j = 0; j < n; ++j) {
        const double* br = b.row(j).data();
        double s = 0.0;
#pragma omp simd reduction(+ : s)
        for (std::size_t p = 0; p < k; ++p) s += ar[p] * br[p];
        cr[j] = alpha * s + (beta == 0.0 ? 0.0 : beta * cr[j]);
      }
    }
    return;
  }

  // op_b == none: accumulate scaled rows of b into rows of c.
  scale_rows(c, beta);
#pragma omp parallel for schedule(static) if (par) num_threads(threads)
  for (std::int64_t i = 0; i < m; ++i) {
    double* cr = c.row(static_cast<std::size_t>(i)).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double av =
          alpha * (op_a == Op::none ? a(static_cast<std::size_t>(i), p)
                                    : a(p, static_cast<std::size_t>(i)));
      if (av == 0.0) continue;
      const double* br = b.row(p).data();
#pragma omp simd
      for (std::size_t j = 0; j < n; ++j) cr[j] += av * br[j];
    }
  }
}

void rbf_gram(const Matrix& x, double gamma, Matrix& out) {
  const std::int64_t n = static_cast<std::int64_t>(x.rows());
  const std::size_t d = x.cols();
  out.resize(x.rows(), x.rows());
  // Upper triangle only; the distance is symmetric bit for bit.
#pragma omp parallel for schedule(dynamic, 32) num_threads(active_threads()) if (n > 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = x.row(static_cast<std::size_t>(i)).data();
    double* oi = out.row(static_cast<std::size_t>(i)).data();
    for (std::int64_t j = i; j < n; ++j) {
      const double* xj = x.row(static_cast<std::size_t>(j)).data();
      double d2 = 0.0;
      for (std::size_t p = 0; p < d; ++p) {
        const double t = xi[p] - xj[p];
        d2 += t * t;
      }
      oi[j] = std::exp(-gamma * d2);
    }
  }
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < i; ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          out(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
}

void linear_gram(const Matrix& x, Matrix& out) {
  out.resize(x.rows(), x.rows());
  parallel::gemm(Op::none, Op::transpose, 1.0, x, x, 0.0, out);
}

}  // namespace parallel
}  // namespace antgen::kernels
