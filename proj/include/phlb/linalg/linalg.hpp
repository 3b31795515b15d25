#pragma once

#include "phlb/signal/epochs.hpp"
#include "phlb/types.hpp"

#include <span>

namespace phlb::linalg {

// Real symmetric matrix. Construction verifies
//   max|M - M^T| <= 1e-10 * max|M|
// and stores the exactly symmetrized (M + M^T) / 2.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& m);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

struct EigenSolution {
  Vector values;   // non-increasing
  Matrix vectors;  // one column per value
  Eigen::Index full_dim = 0;
  bool reduced_rank = false;  // fewer columns than full_dim
};

// Removes each channel's epoch mean when set; without it C is the raw
// second-moment sum.
struct CovarianceOptions {
  bool demean = true;
};

// C = N^-1 sum_e X(e) X(e)^T over epochs.
SymmetricMatrix covariance(const signal::EpochSet& epochs, CovarianceOptions opts = {});

// Zero-mean, unit-variance (population) copy of z. A constant z maps to zeros.
Vector standardize(std::span<const double> z);

struct WeightedCovarianceOptions {
  bool demean = true;
  bool standardize_weights = true;  // off: raw z used as given
};

// C_z = N^-1 sum_e z(e) X(e) X(e)^T.
SymmetricMatrix weighted_covariance(const signal::EpochSet& epochs, std::span<const double> z,
                                    WeightedCovarianceOptions opts = {});

// Full eigendecomposition, values descending, orthonormal vectors. Equal
// values keep the solver's original order. Each vector's largest-magnitude
// entry is made positive.
EigenSolution sym_eig(const SymmetricMatrix& m);
EigenSolution sym_eig(const Matrix& m);

// P (r x N) with P C P^T = I_r over eigendirections whose eigenvalue is at
// least rank_tol * max eigenvalue.
Matrix whiten(const SymmetricMatrix& c, double rank_tol = 1e-10);

struct GeneralizedEigenSolution : EigenSolution {
  SymmetricMatrix regularized_c;  // the C actually used: w^T C w = 1
};

constexpr double kDefaultShrinkage = 1e-8;

// Solves C_z w = lambda C w via whitening: C is shrunk towards
// trace(C)/N * I, whitened, and the whitened C_z is diagonalized. Vectors
// are C-normalized. Rank-deficient C yields a reduced-rank solution with
// `reduced_rank` set.
GeneralizedEigenSolution generalized_eig(const SymmetricMatrix& c_z, const SymmetricMatrix& c,
                                         double shrinkage = kDefaultShrinkage,
                                         double rank_tol = 1e-10);

// max_i ||C_z w_i - lambda_i C w_i||_2 over the returned pairs.
double gevd_residual(const GeneralizedEigenSolution& sol, const SymmetricMatrix& c_z);

}  // namespace phlb::linalg
