#include "svdgcn/spectral.hpp"

#include <Eigen/SVD>

#include <atomic>

namespace svdgcn {

namespace {
std::atomic<long> g_svd_calls{0};
}

SvdFactors compute_svd(const Matrix& a_hat) {
  if (a_hat.rows() != a_hat.cols()) {
    throw DimensionError("compute_svd expects a square matrix, got " +
                         std::to_string(a_hat.rows()) + "x" +
                         std::to_string(a_hat.cols()));
  }
  if (!a_hat.allFinite()) {
    throw NumericError("compute_svd: input has non-finite entries");
  }
  g_svd_calls.fetch_add(1, std::memory_order_relaxed);

  // BDCSVD falls back to Jacobi internally for small matrices.
  Eigen::BDCSVD<Matrix> svd(a_hat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("SVD failed to converge on a " +
                       std::to_string(a_hat.rows()) + "x" +
                       std::to_string(a_hat.cols()) + " matrix");
  }
  return SvdFactors{svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

long svd_call_count() { return g_svd_calls.load(std::memory_order_relaxed); }

double orthonormality_error(const SvdFactors& f) {
  const int n = f.size();
  const Matrix eye = Matrix::Identity(n, n);
  const double u_err = (f.U.transpose() * f.U - eye).norm();
  const double v_err = (f.V.transpose() * f.V - eye).norm();
  return std::max(u_err, v_err);
}

double reconstruction_error(const SvdFactors& f, const Matrix& a_hat) {
  const double denom = a_hat.norm();
  const double num =
      (f.U * f.lambda.asDiagonal() * f.V.transpose() - a_hat).norm();
  return denom > 0 ? num / denom : num;
}

}  // namespace svdgcn
