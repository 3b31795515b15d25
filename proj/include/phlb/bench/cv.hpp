#pragma once

#include "phlb/labeling/labeling.hpp"
#include "phlb/spoc/spoc.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace phlb::bench {

// Half-open index range [begin, end).
struct FoldRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const FoldRange&) const = default;
};

// k contiguous, ordered folds covering [0, n); the first n % k folds get one
// extra element.
std::vector<FoldRange> chronological_folds(std::size_t n, std::size_t k);

struct FoldResult {
  std::size_t fold = 0;
  double rho = 0.0;
  std::optional<double> alpha_rad;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct CvResult {
  double mean_rho = 0.0;                 // fold average (headline)
  std::optional<double> mean_alpha_rad;  // absent without a ground-truth pattern
  double pooled_rho = 0.0;               // over concatenated test predictions
  std::vector<FoldResult> folds;
};

struct CvOptions {
  std::size_t k = 5;
  spoc::SpocOptions spoc;
};

// Model for one fold: trained on the good epochs outside test fold `fold`.
// Folds index the dataset's good-epoch sequence.
spoc::SpocModel train_fold(const labeling::LabeledDataset& dataset,
                           const std::vector<FoldRange>& folds, std::size_t fold,
                           const spoc::SpocOptions& opts = {});

CvResult run_cv(const labeling::LabeledDataset& dataset, const CvOptions& opts = {});

}  // namespace phlb::bench
