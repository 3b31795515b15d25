#include "phlb/linalg/linalg.hpp"

#include "phlb/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace phlb::linalg {

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::shape_mismatch, "SymmetricMatrix: matrix is not square");
  if (!m.allFinite()) fail(ErrorCode::symmetry_violation, "SymmetricMatrix: non-finite entries");
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  const double asym = m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "SymmetricMatrix: asymmetry " << asym << " exceeds tolerance (scale " << scale << ")";
    fail(ErrorCode::symmetry_violation, msg.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

namespace {

void check_epochs(const signal::EpochSet& epochs, const char* who) {
  if (epochs.empty()) fail(ErrorCode::no_data, std::string(who) + ": empty epoch set");
}

Matrix scatter(const Matrix& epoch, bool demean) {
  if (!demean) return epoch * epoch.transpose();
  const Matrix centred = epoch.colwise() - epoch.rowwise().mean();
  return centred * centred.transpose();
}

}  // namespace

SymmetricMatrix covariance(const signal::EpochSet& epochs, CovarianceOptions opts) {
  check_epochs(epochs, "covariance");
  Matrix c = Matrix::Zero(epochs.n_channels, epochs.n_channels);
  for (const auto& x : epochs.epochs) c.noalias() += scatter(x, opts.demean);
  c /= static_cast<double>(epochs.size());
  return SymmetricMatrix(c);
}

Vector standardize(std::span<const double> z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Vector out = Eigen::Map<const Vector>(z.data(), n);
  if (n == 0) return out;
  out.array() -= out.mean();
  const double sd = std::sqrt(out.squaredNorm() / static_cast<double>(n));
  if (sd > 0.0) {
    out /= sd;
  } else {
    out.setZero();
  }
  return out;
}

SymmetricMatrix weighted_covariance(const signal::EpochSet& epochs, std::span<const double> z,
                                    WeightedCovarianceOptions opts) {
  check_epochs(epochs, "weighted_covariance");
  if (z.size() != epochs.size()) {
    std::ostringstream msg;
    msg << "weighted_covariance: " << z.size() << " weights for " << epochs.size() << " epochs";
    fail(ErrorCode::shape_mismatch, msg.str());
  }
  const Vector w = opts.standardize_weights
                       ? standardize(z)
                       : Vector(Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size())));
  Matrix c = Matrix::Zero(epochs.n_channels, epochs.n_channels);
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    const double weight = w(static_cast<Eigen::Index>(e));
    if (weight != 0.0) c.noalias() += weight * scatter(epochs.epochs[e], opts.demean);
  }
  c /= static_cast<double>(epochs.size());
  return SymmetricMatrix(c);
}

EigenSolution sym_eig(const SymmetricMatrix& m) {
  const Eigen::Index n = m.dim();
  EigenSolution sol;
  sol.full_dim = n;
  if (n == 0) return sol;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::rank_zero, "sym_eig: eigensolver did not converge");
  }
  // Solver returns ascending values; stable sort gives descending order that
  // keeps the original order among ties.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return vals(a) > vals(b); });

  sol.values.resize(n);
  sol.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    sol.values(i) = vals(src);
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    sol.vectors.col(i) = v;
  }
  return sol;
}

EigenSolution sym_eig(const Matrix& m) { return sym_eig(SymmetricMatrix(m)); }

Matrix whiten(const SymmetricMatrix& c, double rank_tol) {
  const EigenSolution eig = sym_eig(c);
  if (eig.values.size() == 0 || !(eig.values(0) > 0.0)) {
    fail(ErrorCode::rank_zero, "whiten: matrix has no positive eigenvalue");
  }
  const double floor = rank_tol * eig.values(0);
  Eigen::Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) >= floor && eig.values(rank) > 0.0) ++rank;

  Matrix p(rank, c.dim());
  for (Eigen::Index i = 0; i < rank; ++i) {
    p.row(i) = eig.vectors.col(i).transpose() / std::sqrt(eig.values(i));
  }
  return p;
}

GeneralizedEigenSolution generalized_eig(const SymmetricMatrix& c_z, const SymmetricMatrix& c,
                                         double shrinkage, double rank_tol) {
  if (c_z.dim() != c.dim()) fail(ErrorCode::shape_mismatch, "generalized_eig: dimension mismatch");
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    fail(ErrorCode::invalid_regularization, "generalized_eig: shrinkage must lie in [0, 1]");
  }
  const Eigen::Index n = c.dim();
  Matrix reg = (1.0 - shrinkage) * c.matrix();
  if (shrinkage > 0.0) {
    reg.diagonal().array() += shrinkage * c.matrix().trace() / static_cast<double>(n);
  }

  GeneralizedEigenSolution sol;
  sol.regularized_c = SymmetricMatrix(reg);
  const Matrix p = whiten(sol.regularized_c, rank_tol);
  const Matrix whitened = p * c_z.matrix() * p.transpose();
  const EigenSolution inner = sym_eig(Matrix(0.5 * (whitened + whitened.transpose())));

  sol.full_dim = n;
  sol.values = inner.values;
  sol.vectors = p.transpose() * inner.vectors;
  sol.reduced_rank = p.rows() < n;
  return sol;
}

double gevd_residual(const GeneralizedEigenSolution& sol, const SymmetricMatrix& c_z) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sol.vectors.cols(); ++i) {
    const Vector w = sol.vectors.col(i);
    const Vector r = c_z.matrix() * w - sol.values(i) * (sol.regularized_c.matrix() * w);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace phlb::linalg
