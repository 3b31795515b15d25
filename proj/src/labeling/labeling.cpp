#include "phlb/labeling/labeling.hpp"

#include "phlb/error.hpp"
#include "phlb/random.hpp"
#include "phlb/signal/hilbert.hpp"
#include "phlb/signal/iir.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phlb::labeling {

namespace {

Eigen::RowVectorXd projection_row(const source::Projection& projection, Eigen::Index index) {
  if (index < 0 || index >= source::source_count(projection)) {
    fail(ErrorCode::invalid_index, "extract_labels: source index out of range");
  }
  if (const auto* op = std::get_if<source::InverseOperator>(&projection)) return op->m.row(index);
  return std::get<source::UnmixingModel>(projection).phi.row(index);
}

void check_channels(const TimeSeriesMatrix& x, const source::Projection& projection) {
  if (source::channel_count(projection) != x.n_channels()) {
    fail(ErrorCode::shape_mismatch, "extract_labels: projection and recording channel counts differ");
  }
}

}  // namespace

Eigen::Index select_target_source(std::span<const double> relative_power,
                                  const TargetCriterion& criterion) {
  const auto n = static_cast<Eigen::Index>(relative_power.size());
  if (const auto* e = std::get_if<ExplicitIndex>(&criterion)) {
    if (e->index < 0 || e->index >= n) {
      std::ostringstream msg;
      msg << "select_target_source: index " << e->index << " outside [0, " << n << ")";
      fail(ErrorCode::invalid_index, msg.str());
    }
    return e->index;
  }
  if (n < 1) fail(ErrorCode::invalid_index, "select_target_source: no sources");
  if (const auto* r = std::get_if<RandomSource>(&criterion)) {
    Rng rng(r->seed);
    return static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
  }
  const double q = std::get<PowerQuantile>(criterion).q;
  if (!(q >= 0.0 && q <= 1.0)) {
    fail(ErrorCode::invalid_request, "select_target_source: quantile must lie in [0, 1]");
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(relative_power[static_cast<std::size_t>(i)] - q) <
        std::abs(relative_power[static_cast<std::size_t>(best)] - q)) {
      best = i;
    }
  }
  return best;
}

Eigen::Index select_target_source(const TimeSeriesMatrix& sources, const TargetCriterion& criterion) {
  if (const auto* e = std::get_if<ExplicitIndex>(&criterion)) {
    std::vector<double> dummy(static_cast<std::size_t>(sources.n_channels()), 0.0);
    return select_target_source(dummy, *e);
  }
  if (std::holds_alternative<RandomSource>(criterion)) {
    std::vector<double> dummy(static_cast<std::size_t>(sources.n_channels()), 0.0);
    return select_target_source(dummy, criterion);
  }
  return select_target_source(source::relative_source_power(sources), criterion);
}

ExtractedLabels extract_labels(const TimeSeriesMatrix& x, const source::Projection& projection,
                               Band band, Eigen::Index source_index, int filter_order) {
  check_channels(x, projection);
  const Eigen::RowVectorXd row = projection_row(projection, source_index);
  const TimeSeriesMatrix band_limited = signal::bandpass(x, band, filter_order);
  ExtractedLabels out;
  out.source_index = source_index;
  const Eigen::RowVectorXd s = row * band_limited.data();
  out.source.assign(s.data(), s.data() + s.size());
  out.z = signal::hilbert_envelope(out.source);
  return out;
}

ExtractedLabels extract_labels_project_first(const TimeSeriesMatrix& x,
                                             const source::Projection& projection, Band band,
                                             Eigen::Index source_index, int filter_order) {
  check_channels(x, projection);
  const Eigen::RowVectorXd row = projection_row(projection, source_index);
  const Eigen::RowVectorXd raw = row * x.data();
  const auto spec =
      signal::design_butterworth_bandpass(band.low_hz, band.high_hz, filter_order, x.sample_rate_hz());
  ExtractedLabels out;
  out.source_index = source_index;
  out.source = signal::filtfilt(spec, std::span<const double>(raw.data(), raw.size()));
  out.z = signal::hilbert_envelope(out.source);
  return out;
}

std::vector<std::size_t> LabeledDataset::good_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t e = 0; e < good.size(); ++e) {
    if (good[e]) idx.push_back(e);
  }
  return idx;
}

std::size_t LabeledDataset::good_count() const {
  return static_cast<std::size_t>(std::count(good.begin(), good.end(), true));
}

LabeledDataset LabeledDataset::select(const std::vector<std::size_t>& indices) const {
  LabeledDataset out;
  out.epochs = epochs.subset(indices);
  out.band = band;
  out.source = source;
  out.ground_truth_pattern = ground_truth_pattern;
  out.labels.reserve(indices.size());
  out.good.reserve(indices.size());
  for (std::size_t i : indices) {
    out.labels.push_back(labels[i]);
    out.good.push_back(good[i]);
  }
  return out;
}

LabeledDataset LabeledDataset::first_good(std::size_t n) const {
  std::vector<std::size_t> idx = good_indices();
  if (idx.size() > n) idx.resize(n);
  return select(idx);
}

std::vector<double> LabeledDataset::good_labels() const {
  std::vector<double> out;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (good[e]) out.push_back(labels[e]);
  }
  return out;
}

LabeledDataset build_dataset(const TimeSeriesMatrix& x_band, std::span<const double> z,
                             double window_s, const std::vector<bool>& artifact_mask,
                             LabelStatistic statistic) {
  if (static_cast<Eigen::Index>(z.size()) != x_band.n_samples()) {
    std::ostringstream msg;
    msg << "build_dataset: " << z.size() << " label samples for " << x_band.n_samples()
        << " recording samples";
    fail(ErrorCode::shape_mismatch, msg.str());
  }
  LabeledDataset ds;
  ds.epochs = signal::epoch(x_band, window_s);
  const std::size_t count = ds.epochs.size();
  if (!artifact_mask.empty() && artifact_mask.size() != count) {
    std::ostringstream msg;
    msg << "build_dataset: artifact mask has " << artifact_mask.size() << " entries for " << count
        << " epochs";
    fail(ErrorCode::shape_mismatch, msg.str());
  }
  const auto length = static_cast<std::size_t>(ds.epochs.length);
  ds.labels.resize(count);
  ds.good.resize(count);
  for (std::size_t e = 0; e < count; ++e) {
    const auto first = static_cast<std::size_t>(ds.epochs.starts[e]);
    double acc = 0.0;
    for (std::size_t i = first; i < first + length; ++i) {
      acc += statistic == LabelStatistic::mean_square_envelope ? z[i] * z[i] : z[i];
    }
    ds.labels[e] = acc / static_cast<double>(length);
    ds.good[e] = artifact_mask.empty() ? true : !artifact_mask[e];
  }
  return ds;
}

std::vector<double> add_label_noise(std::span<const double> z, const NoiseSpec& spec) {
  if (!(spec.xi >= 0.0 && spec.xi < 1.0)) {
    fail(ErrorCode::invalid_noise, "add_label_noise: xi must lie in [0, 1)");
  }
  if (z.size() < 2) fail(ErrorCode::degenerate_labels, "add_label_noise: needs >= 2 labels");
  const Eigen::Map<const Vector> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  const double mean = zv.mean();
  const double var = (zv.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
  if (!(var > 0.0)) fail(ErrorCode::degenerate_labels, "add_label_noise: labels have zero variance");

  std::vector<double> out(z.begin(), z.end());
  if (spec.xi == 0.0) return out;

  const double rho = 1.0 - spec.xi;
  const double ratio = (1.0 - rho * rho) / (rho * rho);
  const double coeff = spec.form == NoiseForm::corrected ? std::sqrt(ratio * var) : ratio * var;
  Rng rng(spec.seed);
  for (double& v : out) v += coeff * rng.normal();
  return out;
}

PreparedRecording prepare_recording(const TimeSeriesMatrix& x, source::Projection projection,
                                    const PipelineOptions& options) {
  if (source::channel_count(projection) != x.n_channels()) {
    fail(ErrorCode::shape_mismatch, "prepare_recording: projection and recording channel counts differ");
  }
  PreparedRecording p{signal::bandpass(x, options.band, options.filter_order),
                      {},
                      TimeSeriesMatrix{},
                      {},
                      std::move(projection),
                      options};
  const TimeSeriesMatrix detect = signal::bandpass(x, options.detect_band, options.filter_order);
  p.artifacts = signal::mark_artifacts(detect, options.window_s, options.p2p_threshold);
  p.sources = source::project(p.projection, p.band_limited);
  p.relative_power = source::relative_source_power(p.sources, options.power_scale);
  return p;
}

LabeledDataset label_source(const PreparedRecording& prepared, Eigen::Index source_index) {
  if (source_index < 0 || source_index >= prepared.sources.n_channels()) {
    fail(ErrorCode::invalid_index, "label_source: source index out of range");
  }
  const Eigen::RowVectorXd s = prepared.sources.data().row(source_index);
  const std::vector<double> z = signal::hilbert_envelope(std::span<const double>(s.data(), s.size()));
  LabeledDataset ds = build_dataset(prepared.band_limited, z, prepared.options.window_s,
                                    prepared.artifacts, prepared.options.statistic);
  ds.band = prepared.options.band;
  ds.source.projection = source::projection_name(prepared.projection);
  ds.source.index = source_index;
  ds.source.relative_power = prepared.relative_power[static_cast<std::size_t>(source_index)];
  ds.ground_truth_pattern = source::source_pattern(prepared.projection, source_index);
  return ds;
}

}  // namespace phlb::labeling
