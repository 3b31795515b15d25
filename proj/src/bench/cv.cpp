#include "phlb/bench/cv.hpp"

#include "phlb/error.hpp"

#include <cmath>
#include <sstream>

namespace phlb::bench {

std::vector<FoldRange> chronological_folds(std::size_t n, std::size_t k) {
  if (k < 1) fail(ErrorCode::invalid_config, "chronological_folds: k must be >= 1");
  if (n < k) {
    std::ostringstream msg;
    msg << "chronological_folds: " << n << " epochs cannot fill " << k << " folds";
    fail(ErrorCode::insufficient_data, msg.str());
  }
  std::vector<FoldRange> folds;
  folds.reserve(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t begin = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds.push_back({begin, begin + size});
    begin += size;
  }
  return folds;
}

namespace {

std::vector<std::size_t> train_positions(const std::vector<FoldRange>& folds, std::size_t fold,
                                         const std::vector<std::size_t>& good) {
  std::vector<std::size_t> idx;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == fold) continue;
    for (std::size_t i = folds[f].begin; i < folds[f].end; ++i) idx.push_back(good[i]);
  }
  return idx;
}

}  // namespace

spoc::SpocModel train_fold(const labeling::LabeledDataset& dataset,
                           const std::vector<FoldRange>& folds, std::size_t fold,
                           const spoc::SpocOptions& opts) {
  if (fold >= folds.size()) fail(ErrorCode::invalid_index, "train_fold: fold out of range");
  const auto good = dataset.good_indices();
  if (folds.empty() || folds.back().end != good.size()) {
    fail(ErrorCode::shape_mismatch, "train_fold: folds do not cover the good epochs");
  }
  return spoc::spoc_train(dataset.select(train_positions(folds, fold, good)), opts);
}

CvResult run_cv(const labeling::LabeledDataset& dataset, const CvOptions& opts) {
  const auto good = dataset.good_indices();
  if (opts.k < 2) fail(ErrorCode::invalid_config, "run_cv: k must be >= 2");
  if (good.size() < opts.k) {
    std::ostringstream msg;
    msg << "run_cv: " << good.size() << " good epochs for " << opts.k << " folds";
    fail(ErrorCode::insufficient_data, msg.str());
  }
  const auto folds = chronological_folds(good.size(), opts.k);

  CvResult result;
  std::vector<double> pooled_pred;
  std::vector<double> pooled_true;
  double alpha_sum = 0.0;
  double rho_sum = 0.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const spoc::SpocModel model = train_fold(dataset, folds, f, opts.spoc);
    const std::vector<std::size_t> test(good.begin() + static_cast<std::ptrdiff_t>(folds[f].begin),
                                        good.begin() + static_cast<std::ptrdiff_t>(folds[f].end));
    const labeling::LabeledDataset test_set = dataset.select(test);
    const std::vector<double> pred = spoc::spoc_predict(model, test_set.epochs);

    FoldResult fr;
    fr.fold = f;
    fr.n_test = test.size();
    fr.n_train = good.size() - test.size();
    fr.rho = spoc::correlation_metric(pred, test_set.labels);
    if (dataset.ground_truth_pattern) {
      fr.alpha_rad = spoc::pattern_angle(*dataset.ground_truth_pattern, model.pattern);
      alpha_sum += *fr.alpha_rad;
    }
    rho_sum += fr.rho;
    pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
    pooled_true.insert(pooled_true.end(), test_set.labels.begin(), test_set.labels.end());
    result.folds.push_back(fr);
  }
  const auto k = static_cast<double>(folds.size());
  result.mean_rho = rho_sum / k;
  if (dataset.ground_truth_pattern) result.mean_alpha_rad = alpha_sum / k;
  result.pooled_rho = spoc::correlation_metric(pooled_pred, pooled_true);
  return result;
}

}  // namespace phlb::bench
