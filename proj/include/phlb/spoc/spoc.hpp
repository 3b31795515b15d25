#pragma once

#include "phlb/labeling/labeling.hpp"
#include "phlb/linalg/linalg.hpp"
#include "phlb/signal/epochs.hpp"
#include "phlb/types.hpp"

#include <span>
#include <vector>

namespace phlb::spoc {

enum class ComponentRule {
  largest_signed,     // strongest positive covariation with z
  largest_magnitude,  // largest |lambda|
};

struct SpocOptions {
  double shrinkage = linalg::kDefaultShrinkage;
  ComponentRule rule = ComponentRule::largest_signed;
  bool standardize_labels = true;
};

struct SpocModel {
  Vector w;        // spatial filter, w^T C w = 1
  Vector pattern;  // C w (w^T C w)^-1
  double eigenvalue = 0.0;
  Band band;
  linalg::SymmetricMatrix training_c;  // regularized training covariance
  Vector spectrum;                     // all generalized eigenvalues, descending
  bool reduced_rank = false;
};

// Trains on the given epochs and labels (one label per epoch).
SpocModel spoc_train(const signal::EpochSet& epochs, std::span<const double> labels, Band band,
                     const SpocOptions& opts = {});
// Trains on the good epochs of a dataset.
SpocModel spoc_train(const labeling::LabeledDataset& dataset, const SpocOptions& opts = {});

// z_hat(e) = var[w^T X(e)] (population variance over the epoch's samples).
std::vector<double> spoc_predict(const SpocModel& model, const signal::EpochSet& epochs);

// Pearson correlation; constant inputs raise undefined_correlation.
double correlation_metric(std::span<const double> z_hat, std::span<const double> z);

// Sign-folded angle between two patterns, in [0, pi/2].
double pattern_angle(const Vector& a_true, const Vector& a_est);

}  // namespace phlb::spoc
