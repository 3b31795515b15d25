#pragma once

#include "phlb/signal/epochs.hpp"
#include "phlb/source/source_space.hpp"
#include "phlb/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace phlb::labeling {

struct ExplicitIndex {
  Eigen::Index index = 0;
};
// Source whose relative (rank) power is nearest q; ties go to the lower index.
struct PowerQuantile {
  double q = 1.0;
};
struct RandomSource {
  std::uint64_t seed = 0;
};
using TargetCriterion = std::variant<ExplicitIndex, PowerQuantile, RandomSource>;

Eigen::Index select_target_source(const TimeSeriesMatrix& sources, const TargetCriterion& criterion);
// Same, with relative powers already computed (one per source).
Eigen::Index select_target_source(std::span<const double> relative_power,
                                  const TargetCriterion& criterion);

struct ExtractedLabels {
  std::vector<double> z;         // envelope, one value per sample
  std::vector<double> source;    // s_z, the band-limited target source
  Eigen::Index source_index = 0;
};

// Band-limits x (order-5 zero-phase Butterworth), projects it, and takes the
// Hilbert envelope of the selected source.
ExtractedLabels extract_labels(const TimeSeriesMatrix& x, const source::Projection& projection,
                               Band band, Eigen::Index source_index, int filter_order = 5);

// Projection first, band-limiting of the single source afterwards. Agrees with
// extract_labels to rounding for linear projections.
ExtractedLabels extract_labels_project_first(const TimeSeriesMatrix& x,
                                             const source::Projection& projection, Band band,
                                             Eigen::Index source_index, int filter_order = 5);

enum class LabelStatistic {
  mean_square_envelope,  // epoch mean of z^2
  mean_envelope,         // epoch mean of z
};

struct SourceDescriptor {
  std::string projection = "none";
  Eigen::Index index = -1;
  double relative_power = 0.0;
};

struct LabeledDataset {
  signal::EpochSet epochs;
  std::vector<double> labels;
  std::vector<bool> good;
  Band band;
  SourceDescriptor source;
  std::optional<Vector> ground_truth_pattern;

  std::size_t size() const noexcept { return labels.size(); }
  std::vector<std::size_t> good_indices() const;
  std::size_t good_count() const;
  // Keeps the given epochs, in order, with their labels and mask bits.
  LabeledDataset select(const std::vector<std::size_t>& indices) const;
  // The chronologically first n good epochs (all good ones when fewer exist).
  LabeledDataset first_good(std::size_t n) const;
  std::vector<double> good_labels() const;
};

// Epochs the band-limited recording and the aligned envelope; each label is
// the epoch statistic of z. `artifact_mask` (true = artifact) is either empty
// or has one entry per epoch; flagged epochs stay in storage with good = false.
LabeledDataset build_dataset(const TimeSeriesMatrix& x_band, std::span<const double> z,
                             double window_s, const std::vector<bool>& artifact_mask,
                             LabelStatistic statistic = LabelStatistic::mean_square_envelope);

enum class NoiseForm {
  corrected,  // z + sqrt((1 - rho^2) / rho^2) * std(z) * eta, corr -> rho
  literal,    // z + (1 - rho^2) / rho^2 * var(z) * eta
};

struct NoiseSpec {
  double xi = 0.0;  // 0 <= xi < 1, target correlation rho = 1 - xi
  std::uint64_t seed = 0;
  NoiseForm form = NoiseForm::corrected;
};

std::vector<double> add_label_noise(std::span<const double> z, const NoiseSpec& spec);

struct PipelineOptions {
  Band band{8.0, 12.0};
  Band detect_band{0.7, 25.0};
  double window_s = 1.0;
  double p2p_threshold = 80e-6;  // volts
  int filter_order = 5;
  LabelStatistic statistic = LabelStatistic::mean_square_envelope;
  source::PowerScale power_scale = source::PowerScale::rank;
};

// Everything label extraction needs that does not depend on the target
// source, computed once per recording.
struct PreparedRecording {
  TimeSeriesMatrix band_limited;
  std::vector<bool> artifacts;
  TimeSeriesMatrix sources;  // projected band-limited data
  std::vector<double> relative_power;
  source::Projection projection;
  PipelineOptions options;
};

PreparedRecording prepare_recording(const TimeSeriesMatrix& x, source::Projection projection,
                                    const PipelineOptions& options);

// Labeled dataset for one source of a prepared recording, ground-truth
// pattern taken from the projection.
LabeledDataset label_source(const PreparedRecording& prepared, Eigen::Index source_index);

}  // namespace phlb::labeling
