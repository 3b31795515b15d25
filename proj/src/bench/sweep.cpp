#include "phlb/bench/sweep.hpp"

#include "phlb/error.hpp"
#include "phlb/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace phlb::bench {

namespace {

// Stream ids for mix_seed.
constexpr std::uint64_t kSamplingStream = 0x5A;
constexpr std::uint64_t kIcaStream = 0x1CA;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kSubsampleStream = 2;

void invalid(const std::string& what) { fail(ErrorCode::invalid_config, "SweepConfig: " + what); }

}  // namespace

const char* to_string(ProjectionKind kind) noexcept {
  return kind == ProjectionKind::anatomical ? "anatomical" : "data-driven";
}

ProjectionKind parse_projection_kind(const std::string& text) {
  if (text == "anatomical" || text == "mne") return ProjectionKind::anatomical;
  if (text == "data-driven" || text == "data_driven" || text == "ica") return ProjectionKind::data_driven;
  fail(ErrorCode::invalid_config, "unknown projection kind '" + text + "'");
}

void SweepConfig::validate() const {
  if (n_epochs_grid.empty() || xi_grid.empty() || source_power_quantiles.empty()) {
    invalid("grids must be non-empty");
  }
  if (evaluation_budget < 1) invalid("evaluation_budget must be >= 1");
  if (k_folds < 2) invalid("k_folds must be >= 2");
  for (std::size_t n : n_epochs_grid) {
    if (n < 2 * k_folds) invalid("every n_epochs must allow two epochs per fold");
  }
  for (double xi : xi_grid) {
    if (!(xi >= 0.0 && xi < 1.0)) invalid("xi values must lie in [0, 1)");
  }
  for (double q : source_power_quantiles) {
    if (!(q >= 0.0 && q <= 1.0)) invalid("source power quantiles must lie in [0, 1]");
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) invalid("shrinkage must lie in [0, 1]");
  if (!(mne_lambda > 0.0)) invalid("mne_lambda must be positive");
  if (ica_components < 1) invalid("ica_components must be >= 1");
  if (threads < 1) invalid("threads must be >= 1");
}

std::vector<ConfigPoint> sample_configurations(const SweepConfig& config) {
  config.validate();
  const std::size_t nq = config.source_power_quantiles.size();
  const std::size_t nx = config.xi_grid.size();
  const std::size_t total = config.n_epochs_grid.size() * nx * nq;
  auto point_at = [&](std::size_t flat) {
    return ConfigPoint{config.n_epochs_grid[flat / (nx * nq)], config.xi_grid[(flat / nq) % nx],
                       config.source_power_quantiles[flat % nq]};
  };

  Rng rng(mix_seed(config.seed, kSamplingStream));
  std::vector<ConfigPoint> points;
  points.reserve(config.evaluation_budget);
  if (config.evaluation_budget <= total) {
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < config.evaluation_budget; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.index(total - i));
      std::swap(order[i], order[j]);
      points.push_back(point_at(order[i]));
    }
  } else {
    for (std::size_t i = 0; i < config.evaluation_budget; ++i) {
      points.push_back(point_at(static_cast<std::size_t>(rng.index(total))));
    }
  }
  return points;
}

source::Projection build_projection(const SweepConfig& config, const RecordingSource& rec) {
  if (config.projection_kind == ProjectionKind::anatomical) {
    if (!rec.lead_field) fail(ErrorCode::invalid_config, "anatomical sweep needs a lead field");
    return source::mne_inverse_operator(*rec.lead_field, config.mne_lambda);
  }
  source::FastIcaOptions ica;
  ica.n_components = std::min(config.ica_components, rec.recording.n_channels());
  ica.seed = mix_seed(config.seed, kIcaStream);
  return source::fast_ica(rec.recording, ica);
}

SweepResult evaluate_configuration(const SweepConfig& config,
                                   const labeling::LabeledDataset& dataset, std::size_t config_id,
                                   const ConfigPoint& point) {
  SweepResult r;
  r.config_id = config_id;
  r.point = point;
  r.seed = mix_seed(config.seed, config_id);
  r.source_index = dataset.source.index;

  labeling::LabeledDataset subset;
  if (config.subsample == SubsampleMode::first) {
    subset = dataset.first_good(point.n_epochs);
  } else {
    std::vector<std::size_t> good = dataset.good_indices();
    Rng rng(mix_seed(r.seed, kSubsampleStream));
    const std::size_t take = std::min(point.n_epochs, good.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(good[i], good[i + static_cast<std::size_t>(rng.index(good.size() - i))]);
    }
    good.resize(take);
    std::sort(good.begin(), good.end());
    subset = dataset.select(good);
  }
  r.point.n_epochs = subset.size();

  subset.labels = labeling::add_label_noise(subset.labels, {point.xi, mix_seed(r.seed, kNoiseStream)});

  CvOptions cv;
  cv.k = config.k_folds;
  cv.spoc.shrinkage = config.shrinkage;
  const CvResult res = run_cv(subset, cv);
  r.mean_rho = res.mean_rho;
  r.mean_alpha_rad = res.mean_alpha_rad.value_or(std::numeric_limits<double>::quiet_NaN());
  r.folds = res.folds;
  return r;
}

std::vector<SweepResult> run_sweep(const SweepConfig& config, const RecordingSource& rec,
                                   const SweepHooks& hooks) {
  config.validate();
  const std::vector<ConfigPoint> points = sample_configurations(config);
  const labeling::PreparedRecording prepared =
      labeling::prepare_recording(rec.recording, build_projection(config, rec), config.pipeline);

  // Label every source the sweep touches up front; evaluations only read.
  std::vector<Eigen::Index> source_of(points.size());
  std::map<Eigen::Index, labeling::LabeledDataset> datasets;
  for (std::size_t i = 0; i < points.size(); ++i) {
    source_of[i] = labeling::select_target_source(prepared.relative_power,
                                                  labeling::PowerQuantile{points[i].rel_power});
    if (!hooks.completed.contains(i) && !datasets.contains(source_of[i])) {
      datasets.emplace(source_of[i], labeling::label_source(prepared, source_of[i]));
    }
  }

  std::vector<std::optional<SweepResult>> slots(points.size());
  std::vector<char> done(points.size(), 0);
  std::size_t next_emit = 0;
  std::mutex sink_mutex;
  std::atomic<std::size_t> next_job{0};
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_job.fetch_add(1);
      if (i >= points.size()) return;
      std::optional<SweepResult> r;
      if (!hooks.completed.contains(i)) {
        try {
          r = evaluate_configuration(config, datasets.at(source_of[i]), i, points[i]);
          r->recording_id = rec.id;
        } catch (...) {
          std::lock_guard lock(sink_mutex);
          if (!error) error = std::current_exception();
          next_job = points.size();
          return;
        }
      }
      // Single writer: emit the completed prefix in configuration order.
      std::lock_guard lock(sink_mutex);
      slots[i] = std::move(r);
      done[i] = 1;
      while (next_emit < points.size() && done[next_emit]) {
        if (slots[next_emit] && hooks.on_result) hooks.on_result(*slots[next_emit]);
        ++next_emit;
      }
    }
  };

  if (config.threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < config.threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<SweepResult> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

Dimension parse_dimension(const std::string& text) {
  if (text == "n_epochs") return Dimension::n_epochs;
  if (text == "xi") return Dimension::xi;
  if (text == "rel_power") return Dimension::rel_power;
  fail(ErrorCode::invalid_dimension, "unknown dimension '" + text + "' (n_epochs, xi, rel_power)");
}

const char* to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::n_epochs: return "n_epochs";
    case Dimension::xi: return "xi";
    case Dimension::rel_power: return "rel_power";
  }
  return "unknown";
}

std::vector<MarginalRow> marginalize(const std::vector<SweepResult>& results, Dimension dimension) {
  if (results.empty()) fail(ErrorCode::no_data, "marginalize: no results");
  std::map<double, std::vector<const SweepResult*>> groups;
  for (const auto& r : results) {
    double key = 0.0;
    switch (dimension) {
      case Dimension::n_epochs: key = static_cast<double>(r.point.n_epochs); break;
      case Dimension::xi: key = r.point.xi; break;
      case Dimension::rel_power: key = r.point.rel_power; break;
    }
    groups[key].push_back(&r);
  }

  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / static_cast<double>(v.size()))};
  };

  std::vector<MarginalRow> out;
  for (const auto& [value, rows] : groups) {
    std::vector<double> rho;
    std::vector<double> alpha;
    for (const auto* r : rows) {
      rho.push_back(r->mean_rho);
      alpha.push_back(r->mean_alpha_rad);
    }
    MarginalRow m;
    m.value = value;
    m.count = rows.size();
    std::tie(m.mean_rho, m.std_rho) = mean_std(rho);
    std::tie(m.mean_alpha_rad, m.std_alpha_rad) = mean_std(alpha);
    out.push_back(m);
  }
  return out;
}

}  // namespace phlb::bench
