#pragma once

#include "svdgcn/common.hpp"

namespace svdgcn {

/// Full SVD of a square matrix, a_hat = U * diag(lambda) * V^T, with the
/// singular values sorted non-increasing. U and V hold the left/right
/// singular vectors as columns and form a dual pair of orthonormal bases.
struct SvdFactors {
  Matrix U;
  Matrix V;
  Vector lambda;

  int size() const { return static_cast<int>(lambda.size()); }
};

/// Computes the full SVD of the (square, finite) input. Sign and
/// repeated-value subspace ambiguities are accepted as-is; everything built
/// downstream is invariant under them.
SvdFactors compute_svd(const Matrix& a_hat);

/// Number of compute_svd invocations in this process. Lets the large-graph
/// path assert that it never decomposed anything.
long svd_call_count();

/// max(||U^T U - I||_F, ||V^T V - I||_F) — orthonormality residual.
double orthonormality_error(const SvdFactors& f);

/// ||U diag(lambda) V^T - a_hat||_F / ||a_hat||_F.
double reconstruction_error(const SvdFactors& f, const Matrix& a_hat);

}  // namespace svdgcn
