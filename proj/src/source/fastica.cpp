#include "phlb/error.hpp"
#include "phlb/linalg/linalg.hpp"
#include "phlb/random.hpp"
#include "phlb/source/source_space.hpp"

#include <cmath>
#include <sstream>

namespace phlb::source {

namespace {

// (W W^T)^-1/2 W
Matrix symmetric_decorrelation(const Matrix& w) {
  const linalg::EigenSolution eig = linalg::sym_eig(Matrix(w * w.transpose()));
  const Vector inv_sqrt = eig.values.array().max(1e-300).rsqrt();
  return eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose() * w;
}

}  // namespace

UnmixingModel fast_ica(const TimeSeriesMatrix& x, const FastIcaOptions& opts) {
  const Eigen::Index n_channels = x.n_channels();
  const Eigen::Index n_comp = opts.n_components == 0 ? n_channels : opts.n_components;
  if (n_comp < 1 || n_comp > n_channels) {
    std::ostringstream msg;
    msg << "fast_ica: " << n_comp << " components requested from " << n_channels << " channels";
    fail(ErrorCode::invalid_request, msg.str());
  }
  const auto n = static_cast<double>(x.n_samples());

  UnmixingModel model;
  model.seed = opts.seed;
  model.channel_mean = x.data().rowwise().mean();
  const Matrix centred = x.data().colwise() - model.channel_mean;
  const Matrix cov = centred * centred.transpose() / n;

  // PCA whitening onto the leading n_comp directions.
  const linalg::EigenSolution pca = linalg::sym_eig(cov);
  const double floor = 1e-12 * pca.values(0);
  if (!(pca.values(n_comp - 1) > floor)) {
    fail(ErrorCode::invalid_request, "fast_ica: data rank is below the requested component count");
  }
  Matrix whitening(n_comp, n_channels);
  for (Eigen::Index i = 0; i < n_comp; ++i) {
    whitening.row(i) = pca.vectors.col(i).transpose() / std::sqrt(pca.values(i));
  }
  const Matrix z = whitening * centred;

  Rng rng(opts.seed);
  Matrix w(n_comp, n_comp);
  for (Eigen::Index i = 0; i < n_comp; ++i) {
    for (Eigen::Index j = 0; j < n_comp; ++j) w(i, j) = rng.uniform(-1.0, 1.0);
  }
  w = symmetric_decorrelation(w);

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Matrix g = (w * z).array().tanh().matrix();
    const Vector g_prime_mean = (1.0 - g.array().square()).rowwise().mean();
    Matrix w_new = g * z.transpose() / n - g_prime_mean.asDiagonal() * w;
    w_new = symmetric_decorrelation(w_new);
    const double change = (1.0 - (w_new * w.transpose()).diagonal().array().abs()).abs().maxCoeff();
    w = std::move(w_new);
    model.n_iterations = it;
    if (change < opts.tol) {
      model.converged = true;
      break;
    }
  }

  model.phi = w * whitening;
  // whitening * cov * whitening^T = I, so this is an exact right inverse.
  model.mixing = cov * whitening.transpose() * w.transpose();
  return model;
}

TimeSeriesMatrix apply_unmixing(const UnmixingModel& model, const TimeSeriesMatrix& x) {
  if (model.phi.cols() != x.n_channels()) {
    fail(ErrorCode::shape_mismatch, "apply_unmixing: channel count mismatch");
  }
  return TimeSeriesMatrix(model.phi * x.data(), x.sample_rate_hz(),
                          default_channel_labels(model.phi.rows(), "IC"));
}

}  // namespace phlb::source
