#include "phlb/spoc/spoc.hpp"

#include "phlb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace phlb::spoc {

SpocModel spoc_train(const signal::EpochSet& epochs, std::span<const double> labels, Band band,
                     const SpocOptions& opts) {
  if (epochs.size() < 2) fail(ErrorCode::insufficient_data, "spoc_train: needs >= 2 epochs");
  if (labels.size() != epochs.size()) {
    fail(ErrorCode::shape_mismatch, "spoc_train: one label per epoch required");
  }
  const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
  if (!(*hi > *lo)) fail(ErrorCode::degenerate_labels, "spoc_train: labels have zero variance");

  const linalg::SymmetricMatrix c = linalg::covariance(epochs);
  const linalg::SymmetricMatrix c_z = linalg::weighted_covariance(
      epochs, labels, {.demean = true, .standardize_weights = opts.standardize_labels});
  const linalg::GeneralizedEigenSolution sol = linalg::generalized_eig(c_z, c, opts.shrinkage);

  Eigen::Index pick = 0;
  if (opts.rule == ComponentRule::largest_magnitude) {
    sol.values.cwiseAbs().maxCoeff(&pick);
  }

  SpocModel model;
  model.w = sol.vectors.col(pick);
  model.eigenvalue = sol.values(pick);
  model.band = band;
  model.training_c = sol.regularized_c;
  model.spectrum = sol.values;
  model.reduced_rank = sol.reduced_rank;

  const Matrix& cm = model.training_c.matrix();
  model.pattern = cm * model.w / model.w.dot(cm * model.w);
  Eigen::Index arg = 0;
  model.pattern.cwiseAbs().maxCoeff(&arg);
  if (model.pattern(arg) < 0.0) {
    model.pattern = -model.pattern;
    model.w = -model.w;
  }
  return model;
}

SpocModel spoc_train(const labeling::LabeledDataset& dataset, const SpocOptions& opts) {
  const auto good = dataset.good_indices();
  if (good.size() < 2) fail(ErrorCode::insufficient_data, "spoc_train: needs >= 2 good epochs");
  const std::vector<double> labels = dataset.good_labels();
  return spoc_train(dataset.epochs.subset(good), labels, dataset.band, opts);
}

std::vector<double> spoc_predict(const SpocModel& model, const signal::EpochSet& epochs) {
  if (!epochs.empty() && epochs.n_channels != model.w.size()) {
    std::ostringstream msg;
    msg << "spoc_predict: filter has " << model.w.size() << " channels, epochs have "
        << epochs.n_channels;
    fail(ErrorCode::shape_mismatch, msg.str());
  }
  std::vector<double> out;
  out.reserve(epochs.size());
  for (const Matrix& x : epochs.epochs) {
    const Eigen::RowVectorXd s = model.w.transpose() * x;
    const double mean = s.mean();
    out.push_back((s.array() - mean).square().sum() / static_cast<double>(s.size()));
  }
  return out;
}

double correlation_metric(std::span<const double> z_hat, std::span<const double> z) {
  if (z_hat.size() != z.size()) fail(ErrorCode::shape_mismatch, "correlation_metric: length mismatch");
  if (z.size() < 2) fail(ErrorCode::undefined_correlation, "correlation_metric: needs >= 2 values");
  const auto n = static_cast<Eigen::Index>(z.size());
  const Vector a = Eigen::Map<const Vector>(z_hat.data(), n).array() -
                   Eigen::Map<const Vector>(z_hat.data(), n).mean();
  const Vector b = Eigen::Map<const Vector>(z.data(), n).array() -
                   Eigen::Map<const Vector>(z.data(), n).mean();
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    fail(ErrorCode::undefined_correlation, "correlation_metric: constant input");
  }
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double pattern_angle(const Vector& a_true, const Vector& a_est) {
  if (a_true.size() != a_est.size()) fail(ErrorCode::shape_mismatch, "pattern_angle: length mismatch");
  const double na = a_true.norm();
  const double nb = a_est.norm();
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorCode::invalid_pattern, "pattern_angle: zero pattern");
  const double raw = std::acos(std::clamp(a_true.dot(a_est) / (na * nb), -1.0, 1.0));
  return raw <= std::numbers::pi / 2.0 ? raw : std::numbers::pi - raw;
}

}  // namespace phlb::spoc
