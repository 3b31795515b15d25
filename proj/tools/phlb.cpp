#include "phlb/bench/io.hpp"
#include "phlb/bench/pipeline.hpp"
#include "phlb/bench/sweep.hpp"
#include "phlb/error.hpp"
#include "phlb/random.hpp"
#include "phlb/source/source_space.hpp"
#include "phlb/spoc/spoc.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

namespace {

using namespace phlb;
namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  std::string band = "8:12";
  double window_s = 1.0;
  double p2p_uv = 80.0;
  std::string config_path;
  std::vector<CLI::Option*> options;  // seed, band, window, p2p

  bool given(std::size_t i) const { return options[i]->count() > 0; }
};

Band parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorCode::invalid_band, "--band expects LOW:HIGH");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
    fail(ErrorCode::invalid_band, "--band expects LOW:HIGH, got '" + text + "'");
  }
}

void add_common(CLI::App* cmd, Common& c) {
  c.options.push_back(cmd->add_option("--seed", c.seed, "Master random seed"));
  c.options.push_back(cmd->add_option("--band", c.band, "Target band LOW:HIGH in Hz")->capture_default_str());
  c.options.push_back(cmd->add_option("--window-s", c.window_s, "Epoch length in seconds")->capture_default_str());
  c.options.push_back(
      cmd->add_option("--p2p-uv", c.p2p_uv, "Peak-to-peak artifact threshold in microvolts")->capture_default_str());
  cmd->add_option("--config", c.config_path, "Sweep configuration file")->check(CLI::ExistingFile);
}

// Config file first, explicit command-line flags on top.
bench::SweepConfig resolve_config(const Common& c) {
  bench::SweepConfig config;
  if (!c.config_path.empty()) config = io::read_config(c.config_path);
  if (c.given(0) || c.config_path.empty()) config.seed = c.seed;
  if (c.given(1) || c.config_path.empty()) config.pipeline.band = parse_band(c.band);
  if (c.given(2) || c.config_path.empty()) config.pipeline.window_s = c.window_s;
  if (c.given(3) || c.config_path.empty()) config.pipeline.p2p_threshold = c.p2p_uv * 1e-6;
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out << text;
}

std::string results_text(const std::vector<bench::SweepResult>& results) {
  std::string text = std::string(io::kResultsHeader) + "\n";
  for (const auto& r : results) text += io::format_result_rows(r);
  return text;
}

// ---- synth

struct SynthArgs {
  Common common;
  std::string out_dir = ".";
  Eigen::Index channels = 31;
  Eigen::Index sources = 50;
  double duration_s = 1200.0;
  double rate_hz = 120.0;
  double snr_db = 10.0;
  Eigen::Index target = -1;
};

void run_synth(const SynthArgs& a) {
  const bench::SweepConfig config = resolve_config(a.common);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);

  const source::LeadField lf = source::synth_lead_field(a.channels, a.sources, mix_seed(config.seed, 1));
  source::SynthOptions opts;
  opts.duration_s = a.duration_s;
  opts.sample_rate_hz = a.rate_hz;
  opts.target_band = config.pipeline.band;
  opts.snr_db = a.snr_db;
  opts.seed = mix_seed(config.seed, 2);
  opts.target_source_index = a.target >= 0 ? a.target
                                           : static_cast<Eigen::Index>(Rng(mix_seed(config.seed, 3)).index(
                                                 static_cast<std::uint64_t>(a.sources)));
  const source::SyntheticRecording rec = source::synth_recording(lf, opts);

  io::write_lead_field(dir / "lead_field.phlb", lf);
  io::write_recording(dir / "recording.phlb", rec.recording,
                      {{"target_source_index", std::to_string(rec.truth.target_source_index)},
                       {"snr_db", io::format_double(rec.truth.snr_db)},
                       {"seed", std::to_string(config.seed)}});
  io::write_matrix(dir / "pattern.phlb", rec.truth.pattern);
  Matrix env(1, static_cast<Eigen::Index>(rec.truth.envelope.size()));
  for (Eigen::Index i = 0; i < env.cols(); ++i) env(0, i) = rec.truth.envelope[static_cast<std::size_t>(i)];
  io::write_matrix(dir / "envelope.phlb", env);
  std::cout << "wrote " << (dir / "recording.phlb").string() << " (" << rec.recording.n_channels() << " x "
            << rec.recording.n_samples() << "), target source " << rec.truth.target_source_index << '\n';
}

// ---- label

struct LabelArgs {
  Common common;
  std::string recording;
  std::string lead_field;
  std::string projection = "anatomical";
  Eigen::Index source_index = -1;
  double quantile = 1.0;
  std::string out;
  std::string pattern;
  bool raw = false;
};

bench::RecordingSource load_source(const std::string& recording, const std::string& lead_field, bool raw) {
  bench::RecordingSource src{io::read_recording(recording), std::nullopt, fs::path(recording).stem().string()};
  if (!raw) src.recording = bench::preprocess(src.recording);
  if (!lead_field.empty()) {
    source::LeadField lf = io::read_lead_field(lead_field);
    src.lead_field = raw ? lf : bench::preprocess(lf);
  }
  return src;
}

void run_label(const LabelArgs& a) {
  bench::SweepConfig config = resolve_config(a.common);
  config.projection_kind = bench::parse_projection_kind(a.projection);
  const bench::RecordingSource src = load_source(a.recording, a.lead_field, a.raw);
  const labeling::PreparedRecording prepared =
      labeling::prepare_recording(src.recording, bench::build_projection(config, src), config.pipeline);
  const Eigen::Index idx =
      a.source_index >= 0 ? a.source_index
                          : labeling::select_target_source(prepared.relative_power, labeling::PowerQuantile{a.quantile});
  labeling::LabeledDataset ds = labeling::label_source(prepared, idx);
  if (!a.pattern.empty()) {
    const Matrix p = io::read_matrix(a.pattern);
    ds.ground_truth_pattern = Eigen::Map<const Vector>(p.data(), p.size());
  }
  io::write_dataset(a.out, ds);
  std::cout << "source " << idx << " (" << ds.source.projection << ", relative power "
            << io::format_double(ds.source.relative_power) << "): " << ds.size() << " epochs, "
            << ds.good_count() << " good\n";
}

// ---- train

struct TrainArgs {
  Common common;
  std::string dataset;
  std::string model_out;
  std::string test;
  double shrinkage = linalg::kDefaultShrinkage;
};

void run_train(const TrainArgs& a) {
  const labeling::LabeledDataset ds = io::read_dataset(a.dataset);
  spoc::SpocOptions opts;
  opts.shrinkage = a.shrinkage;
  const spoc::SpocModel model = spoc::spoc_train(ds, opts);
  if (!a.model_out.empty()) io::write_model(a.model_out, model);

  const labeling::LabeledDataset eval = a.test.empty() ? ds : io::read_dataset(a.test);
  const auto good = eval.good_indices();
  const labeling::LabeledDataset g = eval.select(good);
  const auto pred = spoc::spoc_predict(model, g.epochs);
  std::cout << "eigenvalue," << io::format_double(model.eigenvalue) << '\n';
  std::cout << (a.test.empty() ? "train_rho," : "test_rho,")
            << io::format_double(spoc::correlation_metric(pred, g.labels)) << '\n';
  if (ds.ground_truth_pattern) {
    std::cout << "alpha_rad," << io::format_double(spoc::pattern_angle(*ds.ground_truth_pattern, model.pattern))
              << '\n';
  }
}

// ---- cv

struct CvArgs {
  Common common;
  std::string dataset;
  std::string out;
  std::size_t n_epochs = std::numeric_limits<std::size_t>::max();
  double xi = 0.0;
  std::size_t k = 5;
  double shrinkage = linalg::kDefaultShrinkage;
};

void run_cv_cmd(const CvArgs& a) {
  bench::SweepConfig config = resolve_config(a.common);
  config.k_folds = a.k;
  config.shrinkage = a.shrinkage;
  const labeling::LabeledDataset ds = io::read_dataset(a.dataset);
  const bench::SweepResult r =
      bench::evaluate_configuration(config, ds, 0, {a.n_epochs, a.xi, ds.source.relative_power});
  const std::string text = results_text({r});
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
    std::cout << "mean_rho," << io::format_double(r.mean_rho) << "\nmean_alpha_rad,"
              << io::format_double(r.mean_alpha_rad) << '\n';
  }
}

// ---- sweep

struct SweepArgs {
  Common common;
  std::string recording;
  std::string lead_field;
  std::string out;
  std::optional<std::size_t> budget;
  std::optional<std::string> projection;
  std::optional<std::size_t> threads;
  bool resume = false;
  bool raw = false;
};

void run_sweep_cmd(const SweepArgs& a) {
  bench::SweepConfig config = resolve_config(a.common);
  if (a.budget) config.evaluation_budget = *a.budget;
  if (a.projection) config.projection_kind = bench::parse_projection_kind(*a.projection);
  if (a.threads) config.threads = *a.threads;
  config.validate();

  const bench::RecordingSource src = load_source(a.recording, a.lead_field, a.raw);
  bench::SweepHooks hooks;
  std::vector<bench::SweepResult> previous;
  if (a.resume && fs::exists(a.out)) {
    previous = io::read_results(a.out);
    for (const auto& r : previous) hooks.completed.insert(r.config_id);
  }
  // Rewrite the kept rows so a partially written trailing line is dropped.
  {
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot open '" + a.out + "' for writing");
    out << results_text(previous);
  }
  std::ofstream out(a.out, std::ios::binary | std::ios::app);
  std::size_t emitted = 0;
  hooks.on_result = [&](const bench::SweepResult& r) {
    out << io::format_result_rows(r);
    out.flush();
    ++emitted;
  };
  bench::run_sweep(config, src, hooks);
  std::cerr << "evaluated " << emitted << " configurations, " << hooks.completed.size() << " skipped\n";
  if (!previous.empty()) {
    // Restore configuration order after a resumed run.
    auto all = io::read_results(a.out);
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& x, const auto& y) { return x.config_id < y.config_id; });
    out.close();
    write_text(a.out, results_text(all));
  }
}

// ---- marginalize

struct MarginalizeArgs {
  Common common;
  std::vector<std::string> results;
  std::string dimension = "xi";
  std::string out;
};

void run_marginalize(const MarginalizeArgs& a) {
  std::vector<bench::SweepResult> all;
  for (const auto& path : a.results) {
    auto r = io::read_results(path);
    all.insert(all.end(), r.begin(), r.end());
  }
  const bench::Dimension dim = bench::parse_dimension(a.dimension);
  std::string text = std::string(bench::to_string(dim)) + ",count,mean_rho,std_rho,mean_alpha_rad,std_alpha_rad\n";
  for (const auto& m : bench::marginalize(all, dim)) {
    text += io::format_double(m.value) + ',' + std::to_string(m.count) + ',' + io::format_double(m.mean_rho) + ',' +
            io::format_double(m.std_rho) + ',' + io::format_double(m.mean_alpha_rad) + ',' +
            io::format_double(m.std_alpha_rad) + '\n';
  }
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-hoc labeling benchmark for SPoC band-power decoding"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a lead field, a planted-source recording and its ground truth");
  add_common(s, synth.common);
  s->add_option("--out-dir", synth.out_dir, "Output directory")->capture_default_str();
  s->add_option("--channels", synth.channels, "Number of channels")->capture_default_str();
  s->add_option("--sources", synth.sources, "Number of sources")->capture_default_str();
  s->add_option("--duration-s", synth.duration_s, "Recording length in seconds")->capture_default_str();
  s->add_option("--rate", synth.rate_hz, "Sample rate in Hz")->capture_default_str();
  s->add_option("--snr-db", synth.snr_db, "Target-to-rest sensor power ratio in dB")->capture_default_str();
  s->add_option("--target", synth.target, "Target source index (default: drawn from the seed)");

  LabelArgs label;
  auto* l = app.add_subcommand("label", "Post-hoc labeling of a recording into a dataset");
  add_common(l, label.common);
  l->add_option("--recording", label.recording, "Recording matrix file")->required()->check(CLI::ExistingFile);
  l->add_option("--lead-field", label.lead_field, "Lead field matrix file")->check(CLI::ExistingFile);
  l->add_option("--projection", label.projection, "anatomical | data-driven")->capture_default_str();
  auto* idx_opt = l->add_option("--source-index", label.source_index, "Target source index");
  l->add_option("--quantile", label.quantile, "Target relative-power quantile")
      ->capture_default_str()
      ->excludes(idx_opt);
  l->add_option("--pattern", label.pattern, "Ground-truth pattern matrix file")->check(CLI::ExistingFile);
  l->add_option("--out", label.out, "Dataset prefix")->required();
  l->add_flag("--raw", label.raw, "Skip broadband filtering, resampling and re-referencing");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit SPoC on a dataset and report metrics");
  add_common(t, train.common);
  t->add_option("--dataset", train.dataset, "Dataset prefix")->required();
  t->add_option("--test", train.test, "Held-out dataset prefix for evaluation");
  t->add_option("--model-out", train.model_out, "Model CSV output");
  t->add_option("--shrinkage", train.shrinkage, "Covariance shrinkage")->capture_default_str();

  CvArgs cv;
  auto* c = app.add_subcommand("cv", "Chronological cross-validation on a dataset");
  add_common(c, cv.common);
  c->add_option("--dataset", cv.dataset, "Dataset prefix")->required();
  c->add_option("--out", cv.out, "Results CSV (default: stdout)");
  c->add_option("--n-epochs", cv.n_epochs, "Use the first N good epochs");
  c->add_option("--xi", cv.xi, "Label noise level")->capture_default_str();
  c->add_option("--k", cv.k, "Number of folds")->capture_default_str();
  c->add_option("--shrinkage", cv.shrinkage, "Covariance shrinkage")->capture_default_str();

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "Hyperparameter sweep over dataset size, label noise and source power");
  add_common(w, sweep.common);
  w->add_option("--recording", sweep.recording, "Recording matrix file")->required()->check(CLI::ExistingFile);
  w->add_option("--lead-field", sweep.lead_field, "Lead field matrix file")->check(CLI::ExistingFile);
  w->add_option("--out", sweep.out, "Results CSV")->required();
  w->add_option("--budget", sweep.budget, "Number of configurations");
  w->add_option("--projection", sweep.projection, "anatomical | data-driven");
  w->add_option("--threads", sweep.threads, "Worker threads");
  w->add_flag("--resume", sweep.resume, "Skip configurations already in the results file");
  w->add_flag("--raw", sweep.raw, "Skip broadband filtering, resampling and re-referencing");

  MarginalizeArgs marg;
  auto* m = app.add_subcommand("marginalize", "Aggregate results along one dimension");
  add_common(m, marg.common);
  m->add_option("--results", marg.results, "Results CSV files")->required()->check(CLI::ExistingFile);
  m->add_option("--dimension", marg.dimension, "n_epochs | xi | rel_power")->capture_default_str();
  m->add_option("--out", marg.out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) run_synth(synth);
    if (l->parsed()) run_label(label);
    if (t->parsed()) run_train(train);
    if (c->parsed()) run_cv_cmd(cv);
    if (w->parsed()) run_sweep_cmd(sweep);
    if (m->parsed()) run_marginalize(marg);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
