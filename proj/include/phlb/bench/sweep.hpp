#pragma once

#include "phlb/bench/cv.hpp"
#include "phlb/labeling/labeling.hpp"
#include "phlb/source/source_space.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace phlb::bench {

enum class ProjectionKind { anatomical, data_driven };

const char* to_string(ProjectionKind kind) noexcept;
ProjectionKind parse_projection_kind(const std::string& text);

enum class SubsampleMode { first, random };

struct SweepConfig {
  std::vector<std::size_t> n_epochs_grid{50, 100, 250, 500, 750, 1000, 1500, 2000};
  std::vector<double> xi_grid{0.0, 0.25, 0.5, 0.75, 0.9};
  std::vector<double> source_power_quantiles{0.1, 0.25, 0.5, 0.75, 1.0};
  std::size_t evaluation_budget = 1300;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  ProjectionKind projection_kind = ProjectionKind::anatomical;

  double shrinkage = linalg::kDefaultShrinkage;
  double mne_lambda = 1.0;
  Eigen::Index ica_components = 20;
  SubsampleMode subsample = SubsampleMode::first;
  labeling::PipelineOptions pipeline;
  std::size_t threads = 1;

  // Throws invalid_config on empty grids, out-of-range values, budget 0 or
  // k_folds < 2.
  void validate() const;
};

struct ConfigPoint {
  std::size_t n_epochs = 0;
  double xi = 0.0;
  double rel_power = 0.0;
};

// Seeded uniform sampling over the grid product: without replacement while
// the budget fits, with replacement beyond.
std::vector<ConfigPoint> sample_configurations(const SweepConfig& config);

struct SweepResult {
  std::size_t config_id = 0;
  ConfigPoint point;            // n_epochs holds the count actually used
  double mean_rho = 0.0;
  double mean_alpha_rad = 0.0;  // NaN without ground truth
  std::vector<FoldResult> folds;
  std::uint64_t seed = 0;
  std::string recording_id;
  Eigen::Index source_index = -1;
};

struct RecordingSource {
  TimeSeriesMatrix recording;  // preprocessed, at the analysis rate
  std::optional<source::LeadField> lead_field;  // required for anatomical sweeps
  std::string id = "rec0";
};

// Builds the projection selected by the config (MNE from the lead field, or
// fastICA fitted on the recording).
source::Projection build_projection(const SweepConfig& config, const RecordingSource& rec);

struct SweepHooks {
  // Called once per finished configuration, in config_id order.
  std::function<void(const SweepResult&)> on_result;
  // Configuration ids to skip (already present in a results file).
  std::set<std::size_t> completed;
};

std::vector<SweepResult> run_sweep(const SweepConfig& config, const RecordingSource& rec,
                                   const SweepHooks& hooks = {});

// Evaluates one configuration on the labeled dataset of its target source:
// subsample, inject label noise, cross-validate.
SweepResult evaluate_configuration(const SweepConfig& config,
                                   const labeling::LabeledDataset& dataset, std::size_t config_id,
                                   const ConfigPoint& point);

enum class Dimension { n_epochs, xi, rel_power };

Dimension parse_dimension(const std::string& text);
const char* to_string(Dimension d) noexcept;

struct MarginalRow {
  double value = 0.0;
  std::size_t count = 0;
  double mean_rho = 0.0;
  double std_rho = 0.0;  // population standard deviation
  double mean_alpha_rad = 0.0;
  double std_alpha_rad = 0.0;
};

// Groups results by the chosen dimension's value, ascending.
std::vector<MarginalRow> marginalize(const std::vector<SweepResult>& results, Dimension dimension);

}  // namespace phlb::bench
