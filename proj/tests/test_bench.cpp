#include "phlb/bench/cv.hpp"
#include "phlb/bench/pipeline.hpp"
#include "phlb/bench/sweep.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace phlb;
using namespace phlb::test;

namespace {

struct Fixture {
  source::LeadField lead_field;
  source::SyntheticRecording rec;
  labeling::LabeledDataset dataset;  // planted target, all epochs
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const auto a = source::synth_lead_field(16, 20, 31);
    source::SynthOptions o;
    o.duration_s = 1100.0;
    o.target_source_index = 6;
    o.seed = 32;
    auto rec = source::synth_recording(a, o);
    const auto prepared = labeling::prepare_recording(rec.recording, source::mne_inverse_operator(a, 1.0), {});
    auto ds = labeling::label_source(prepared, 6);
    return Fixture{a, std::move(rec), std::move(ds)};
  }();
  return f;
}

bench::SweepConfig small_config() {
  bench::SweepConfig c;
  c.n_epochs_grid = {50, 2000};
  c.xi_grid = {0.0, 0.9};
  c.source_power_quantiles = {0.1, 1.0};
  c.evaluation_budget = 8;
  c.seed = 5;
  return c;
}

bench::RecordingSource recording_source() {
  return {fixture().rec.recording, fixture().lead_field, "planted"};
}

}  // namespace

TEST_CASE("chronological folds") {
  using bench::FoldRange;
  CHECK(bench::chronological_folds(100, 5) ==
        std::vector<FoldRange>{{0, 20}, {20, 40}, {40, 60}, {60, 80}, {80, 100}});
  std::vector<std::size_t> sizes;
  for (const auto& f : bench::chronological_folds(7, 5)) sizes.push_back(f.size());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 1, 1, 1});
  CHECK_ERROR_CODE(bench::chronological_folds(3, 5), ErrorCode::insufficient_data);
}

TEST_CASE("folds partition the index range") {
  for (std::size_t n = 2; n < 60; ++n) {
    for (std::size_t k = 2; k <= std::min<std::size_t>(n, 9); ++k) {
      const auto folds = bench::chronological_folds(n, k);
      REQUIRE(folds.size() == k);
      std::size_t expected_begin = 0;
      std::size_t smallest = n;
      std::size_t largest = 0;
      for (const auto& f : folds) {
        CHECK(f.begin == expected_begin);
        CHECK(f.end > f.begin);
        expected_begin = f.end;
        smallest = std::min(smallest, f.size());
        largest = std::max(largest, f.size());
      }
      CHECK(expected_begin == n);
      CHECK(largest - smallest <= 1);
      // Larger folds come first.
      for (std::size_t i = 1; i < k; ++i) CHECK(folds[i].size() <= folds[i - 1].size());
    }
  }
}

TEST_CASE("cross-validation on planted data") {
  const auto ds = fixture().dataset.first_good(1000);
  REQUIRE(ds.good_count() == 1000);
  const auto cv = bench::run_cv(ds, {});
  CHECK(cv.mean_rho >= 0.9);
  REQUIRE(cv.mean_alpha_rad.has_value());
  CHECK(*cv.mean_alpha_rad * 180.0 / kPi <= 15.0);
  CHECK(cv.folds.size() == 5);
  CHECK(cv.pooled_rho >= 0.9);
  CHECK(cv.pooled_rho <= 1.0);
  for (const auto& f : cv.folds) {
    CHECK(f.n_test == 200);
    CHECK(f.n_train == 800);
  }
}

TEST_CASE("cross-validation with shuffled labels is at chance") {
  auto ds = fixture().dataset.first_good(1000);
  std::shuffle(ds.labels.begin(), ds.labels.end(), Rng(3).engine());
  CHECK(std::abs(bench::run_cv(ds, {}).mean_rho) <= 0.1);
}

TEST_CASE("cross-validation edge cases") {
  auto ds = fixture().dataset.first_good(4);
  CHECK_ERROR_CODE(bench::run_cv(ds, {}), ErrorCode::insufficient_data);
  auto no_truth = fixture().dataset.first_good(100);
  no_truth.ground_truth_pattern.reset();
  const auto cv = bench::run_cv(no_truth, {});
  CHECK_FALSE(cv.mean_alpha_rad.has_value());
  for (const auto& f : cv.folds) CHECK_FALSE(f.alpha_rad.has_value());
}

TEST_CASE("cross-validation skips artifactual epochs") {
  const auto& ds = fixture().dataset;
  const std::size_t bad = ds.size() - ds.good_count();
  REQUIRE(bad > 0);
  const auto cv = bench::run_cv(ds, {});
  std::size_t tested = 0;
  for (const auto& f : cv.folds) tested += f.n_test;
  CHECK(tested == ds.good_count());
}

TEST_CASE("no test-set leakage: removing the test fold before training changes nothing") {
  const auto ds = fixture().dataset.first_good(300);
  const auto folds = bench::chronological_folds(ds.good_count(), 5);
  for (std::size_t k = 0; k < folds.size(); ++k) {
    std::vector<std::size_t> train;
    const auto good = ds.good_indices();
    for (std::size_t i = 0; i < good.size(); ++i) {
      if (i < folds[k].begin || i >= folds[k].end) train.push_back(good[i]);
    }
    const auto without_test = spoc::spoc_train(ds.select(train));
    const auto fold_model = bench::train_fold(ds, folds, k);
    CHECK(fold_model.w == without_test.w);
    CHECK(fold_model.pattern == without_test.pattern);
  }
}

TEST_CASE("configuration sampling") {
  auto c = small_config();
  const auto points = bench::sample_configurations(c);
  CHECK(points.size() == 8);
  std::set<std::tuple<std::size_t, double, double>> distinct;
  for (const auto& p : points) distinct.insert({p.n_epochs, p.xi, p.rel_power});
  CHECK(distinct.size() == 8);

  const auto again = bench::sample_configurations(c);
  for (std::size_t i = 0; i < points.size(); ++i) CHECK(points[i].xi == again[i].xi);

  c.evaluation_budget = 20;
  const auto beyond = bench::sample_configurations(c);
  CHECK(beyond.size() == 20);
  for (const auto& p : beyond) CHECK((p.n_epochs == 50 || p.n_epochs == 2000));

  c.evaluation_budget = 1;
  c.seed = 9;
  const auto one = bench::sample_configurations(c);
  CHECK(one.size() == 1);
  CHECK(bench::sample_configurations(c)[0].rel_power == one[0].rel_power);
  CHECK(bench::sample_configurations(c)[0].n_epochs == one[0].n_epochs);
}

TEST_CASE("sweep config validation") {
  auto check = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    CHECK_ERROR_CODE(c.validate(), ErrorCode::invalid_config);
  };
  check([](bench::SweepConfig& c) { c.n_epochs_grid.clear(); });
  check([](bench::SweepConfig& c) { c.xi_grid.clear(); });
  check([](bench::SweepConfig& c) { c.source_power_quantiles.clear(); });
  check([](bench::SweepConfig& c) { c.evaluation_budget = 0; });
  check([](bench::SweepConfig& c) { c.k_folds = 1; });
  check([](bench::SweepConfig& c) { c.xi_grid = {1.0}; });
  check([](bench::SweepConfig& c) { c.source_power_quantiles = {1.2}; });
  check([](bench::SweepConfig& c) { c.n_epochs_grid = {8}; });
  check([](bench::SweepConfig& c) { c.shrinkage = 2.0; });
  check([](bench::SweepConfig& c) { c.threads = 0; });
  CHECK_NOTHROW(small_config().validate());
  CHECK(bench::parse_projection_kind("ica") == bench::ProjectionKind::data_driven);
  CHECK(bench::parse_projection_kind("anatomical") == bench::ProjectionKind::anatomical);
  CHECK_ERROR_CODE(bench::parse_projection_kind("pca"), ErrorCode::invalid_config);
}

TEST_CASE("exhaustive small sweep") {
  const auto results = bench::run_sweep(small_config(), recording_source());
  REQUIRE(results.size() == 8);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    CHECK(r.config_id == i);
    CHECK(std::isfinite(r.mean_rho));
    CHECK(r.mean_rho >= -1.0);
    CHECK(r.mean_rho <= 1.0);
    CHECK(r.mean_alpha_rad >= 0.0);
    CHECK(r.mean_alpha_rad <= kPi / 2.0);
    CHECK(r.folds.size() == 5);
    CHECK(r.recording_id == "planted");
    CHECK(r.point.n_epochs <= fixture().dataset.good_count());
  }
}

TEST_CASE("sweeps are deterministic, thread-count independent and resumable") {
  auto c = small_config();
  const auto a = bench::run_sweep(c, recording_source());
  c.threads = 3;
  std::vector<std::size_t> order;
  bench::SweepHooks hooks;
  hooks.on_result = [&](const bench::SweepResult& r) { order.push_back(r.config_id); };
  const auto b = bench::run_sweep(c, recording_source(), hooks);
  CHECK(order == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean_rho == b[i].mean_rho);
    CHECK(a[i].seed == b[i].seed);
  }

  bench::SweepHooks resume;
  resume.completed = {0, 2, 5};
  order.clear();
  resume.on_result = [&](const bench::SweepResult& r) { order.push_back(r.config_id); };
  const auto rest = bench::run_sweep(c, recording_source(), resume);
  CHECK(order == std::vector<std::size_t>{1, 3, 4, 6, 7});
  for (const auto& r : rest) CHECK(r.mean_rho == a[r.config_id].mean_rho);
}

TEST_CASE("heavy label noise lowers performance") {
  auto c = small_config();
  c.n_epochs_grid = {1000};
  c.source_power_quantiles = {1.0};
  c.xi_grid = {0.0, 0.95};
  c.evaluation_budget = 2;
  const auto results = bench::run_sweep(c, recording_source());
  const auto clean = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.point.xi == 0.0; });
  const auto noisy = std::find_if(results.begin(), results.end(), [](const auto& r) { return r.point.xi == 0.95; });
  REQUIRE(clean != results.end());
  REQUIRE(noisy != results.end());
  CHECK(noisy->mean_rho < clean->mean_rho);
}

TEST_CASE("label-noise marginal is non-increasing on planted data") {
  auto c = small_config();
  c.n_epochs_grid = {1000};
  c.source_power_quantiles = {1.0};
  c.xi_grid = {0.0, 0.25, 0.5, 0.75, 0.9};
  c.evaluation_budget = 5;
  const auto rows = bench::marginalize(bench::run_sweep(c, recording_source()), bench::Dimension::xi);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].value > rows[i - 1].value);
    CHECK(rows[i].mean_rho <= rows[i - 1].mean_rho + 0.05);
  }
}

TEST_CASE("data-driven sweeps need no lead field; anatomical ones do") {
  auto c = small_config();
  c.projection_kind = bench::ProjectionKind::data_driven;
  c.ica_components = 8;
  c.evaluation_budget = 2;
  bench::RecordingSource src{fixture().rec.recording, std::nullopt, "ica"};
  const auto results = bench::run_sweep(c, src);
  CHECK(results.size() == 2);
  for (const auto& r : results) CHECK(std::isfinite(r.mean_rho));
  c.projection_kind = bench::ProjectionKind::anatomical;
  CHECK_ERROR_CODE(bench::run_sweep(c, src), ErrorCode::invalid_config);
}

TEST_CASE("marginalization") {
  auto result = [](std::size_t n, double xi, double q, double rho, double alpha) {
    bench::SweepResult r;
    r.point = {n, xi, q};
    r.mean_rho = rho;
    r.mean_alpha_rad = alpha;
    return r;
  };
  SUBCASE("single row") {
    const auto rows = bench::marginalize({result(50, 0.5, 1.0, 0.3, 0.2)}, bench::Dimension::xi);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].value == 0.5);
    CHECK(rows[0].mean_rho == 0.3);
    CHECK(rows[0].std_rho == 0.0);
    CHECK(rows[0].count == 1);
  }
  SUBCASE("two rows with the same value") {
    const auto rows = bench::marginalize({result(50, 0.5, 1.0, 0.2, 0.1), result(100, 0.5, 0.1, 0.4, 0.3)},
                                         bench::Dimension::xi);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_rho == doctest::Approx(0.3));
    CHECK(rows[0].std_rho == doctest::Approx(0.1));
    CHECK(rows[0].mean_alpha_rad == doctest::Approx(0.2));
  }
  SUBCASE("groups come out in ascending order") {
    const auto rows = bench::marginalize({result(500, 0.0, 1.0, 0.9, 0.1), result(50, 0.0, 1.0, 0.4, 0.1),
                                          result(100, 0.0, 1.0, 0.6, 0.1), result(50, 0.0, 1.0, 0.2, 0.1)},
                                         bench::Dimension::n_epochs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 50.0);
    CHECK(rows[0].count == 2);
    CHECK(rows[1].value == 100.0);
    CHECK(rows[2].value == 500.0);
  }
  SUBCASE("errors") {
    CHECK_ERROR_CODE(bench::marginalize({}, bench::Dimension::xi), ErrorCode::no_data);
    CHECK_ERROR_CODE(bench::parse_dimension("snr"), ErrorCode::invalid_dimension);
    CHECK(bench::parse_dimension("rel_power") == bench::Dimension::rel_power);
  }
}

TEST_CASE("preprocessing resamples, filters and re-references") {
  Rng rng(4);
  Matrix m = random_matrix(rng, 4, 10000);
  const auto drift = sine(10.0, 1000.0, 10000);
  for (Eigen::Index i = 0; i < m.cols(); ++i) m(0, i) += 5.0 + drift[static_cast<std::size_t>(i)];
  const auto y = bench::preprocess(TimeSeriesMatrix(m, 1000.0));
  CHECK(y.sample_rate_hz() == 120.0);
  CHECK(y.n_samples() == 1200);
  CHECK(y.data().colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  // The DC offset is gone.
  CHECK(std::abs(y.data().row(0).segment(200, 800).mean()) < 0.1);

  const auto a = source::synth_lead_field(4, 3, 1);
  CHECK(bench::preprocess(a).matrix().colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  bench::PreprocessOptions keep;
  keep.common_average = false;
  CHECK(bench::preprocess(a, keep).matrix() == a.matrix());
}
