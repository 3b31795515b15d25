#include "phlb/linalg/linalg.hpp"
#include "phlb/spoc/spoc.hpp"
#include "support.hpp"

using namespace phlb;
using namespace phlb::test;

namespace {

signal::EpochSet make_epochs(std::vector<Matrix> blocks) {
  signal::EpochSet set;
  set.n_channels = blocks.front().rows();
  set.length = blocks.front().cols();
  for (std::size_t e = 0; e < blocks.size(); ++e) set.starts.push_back(static_cast<Eigen::Index>(e) * set.length);
  set.epochs = std::move(blocks);
  return set;
}

// Epochs X(e) = a * sqrt(z(e)) * noise + isotropic noise of the given std.
struct Planted {
  signal::EpochSet epochs;
  std::vector<double> z;
};

Planted planted_epochs(const Vector& a, double noise_sd, std::size_t n, Eigen::Index length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> blocks;
  std::vector<double> z(n);
  for (std::size_t e = 0; e < n; ++e) {
    z[e] = 0.2 + std::pow(rng.normal(), 2);
    Matrix x = noise_sd * random_matrix(rng, a.size(), length);
    const Eigen::RowVectorXd s = std::sqrt(z[e]) * random_matrix(rng, 1, length);
    x += a * s;
    blocks.push_back(x);
  }
  return {make_epochs(std::move(blocks)), z};
}

double folded_angle(const Vector& a, const Vector& b) {
  return std::acos(std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm())));
}

}  // namespace

TEST_CASE("SPoC finds the channel whose power carries the label") {
  Rng rng(1);
  std::vector<Matrix> blocks;
  std::vector<double> z;
  for (int e = 0; e < 300; ++e) {
    const double power = 0.5 + std::pow(rng.normal(), 2);
    Matrix x(2, 200);
    x.row(0) = std::sqrt(power) * random_matrix(rng, 1, 200);
    x.row(1) = random_matrix(rng, 1, 200);
    blocks.push_back(x);
    z.push_back(power);
  }
  const auto model = spoc::spoc_train(make_epochs(blocks), z, {8, 12});
  CHECK(folded_angle(model.w, Vector::Unit(2, 0)) * 180.0 / kPi <= 5.0);
  CHECK(model.eigenvalue > 0.0);
  CHECK(model.eigenvalue == model.spectrum(0));
}

TEST_CASE("SPoC model invariants") {
  Vector a(4);
  a << 1.0, 0.5, -0.3, 0.2;
  const auto p = planted_epochs(a, 0.5, 200, 100, 2);
  const auto model = spoc::spoc_train(p.epochs, p.z, {8, 12});
  const Matrix& c = model.training_c.matrix();
  CHECK(model.w.dot(c * model.w) == doctest::Approx(1.0).epsilon(1e-8));
  const Vector expected = c * model.w / model.w.dot(c * model.w);
  CHECK((model.pattern - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(model.pattern.allFinite());
  CHECK(model.pattern.norm() > 0.0);
  CHECK(model.band.low_hz == 8.0);
}

TEST_CASE("SPoC training errors") {
  Vector a = Vector::Ones(3);
  const auto p = planted_epochs(a, 1.0, 10, 50, 3);
  CHECK_ERROR_CODE(spoc::spoc_train(p.epochs, std::vector<double>(10, 1.0), {8, 12}), ErrorCode::degenerate_labels);
  CHECK_ERROR_CODE(spoc::spoc_train(p.epochs, std::vector<double>(9, 1.0), {8, 12}), ErrorCode::shape_mismatch);
  const auto one = p.epochs.subset({0});
  CHECK_ERROR_CODE(spoc::spoc_train(one, std::vector<double>{1.0}, {8, 12}), ErrorCode::insufficient_data);

  labeling::LabeledDataset ds;
  ds.epochs = p.epochs;
  ds.labels = p.z;
  ds.good.assign(10, false);
  ds.good[3] = true;
  CHECK_ERROR_CODE(spoc::spoc_train(ds), ErrorCode::insufficient_data);
}

TEST_CASE("SPoC fits planted data at high SNR") {
  Vector a(8);
  a << 1.0, 0.8, 0.3, -0.2, 0.1, 0.0, -0.5, 0.4;
  const auto p = planted_epochs(a, 0.3, 400, 120, 4);
  const auto model = spoc::spoc_train(p.epochs, p.z, {8, 12});
  CHECK(spoc::correlation_metric(spoc::spoc_predict(model, p.epochs), p.z) >= 0.9);
  CHECK(spoc::pattern_angle(a, model.pattern) * 180.0 / kPi <= 5.0);
}

TEST_CASE("trained only on the good epochs of a dataset") {
  Vector a = Vector::Ones(3);
  const auto p = planted_epochs(a, 0.5, 60, 50, 5);
  labeling::LabeledDataset ds;
  ds.epochs = p.epochs;
  ds.labels = p.z;
  ds.good.assign(60, true);
  for (std::size_t e = 0; e < 60; e += 3) ds.good[e] = false;
  ds.band = {7, 13};
  const auto from_ds = spoc::spoc_train(ds);
  const auto idx = ds.good_indices();
  const auto direct = spoc::spoc_train(p.epochs.subset(idx), ds.good_labels(), {7, 13});
  CHECK(from_ds.w == direct.w);
  CHECK(from_ds.band.high_hz == 13.0);
}

TEST_CASE("the returned filter maximizes label covariance over random filters") {
  Vector a(5);
  a << 0.3, -1.0, 0.4, 0.2, 0.6;
  const auto p = planted_epochs(a, 0.8, 150, 60, 6);
  spoc::SpocOptions opts;
  opts.shrinkage = 0.0;
  const auto model = spoc::spoc_train(p.epochs, p.z, {8, 12}, opts);
  const Vector zs = linalg::standardize(p.z);
  const Matrix& c = model.training_c.matrix();
  auto label_cov = [&](const Vector& w) {
    spoc::SpocModel m = model;
    m.w = w;
    const auto zhat = spoc::spoc_predict(m, p.epochs);
    double acc = 0.0;
    for (std::size_t e = 0; e < zhat.size(); ++e) acc += zs(static_cast<Eigen::Index>(e)) * zhat[e];
    return acc / static_cast<double>(zhat.size());
  };
  const double best = label_cov(model.w);
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    Vector u = random_matrix(rng, 5, 1);
    u /= std::sqrt(u.dot(c * u));
    CHECK(label_cov(u) <= best + 1e-6);
  }
}

TEST_CASE("pattern estimate improves with SNR") {
  Vector a(6);
  a << 1.0, -0.4, 0.7, 0.1, 0.3, -0.8;
  std::vector<double> angles;
  for (double snr_db : {0.0, 10.0, 20.0}) {
    double mean_angle = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      // Signal power per channel a^2 / 6 against unit noise.
      const double noise_sd = std::sqrt(a.squaredNorm() / 6.0 / std::pow(10.0, snr_db / 10.0));
      const auto p = planted_epochs(a, noise_sd, 100, 60, 100 + seed);
      const auto model = spoc::spoc_train(p.epochs, p.z, {8, 12});
      mean_angle += spoc::pattern_angle(a, model.pattern) / 10.0;
    }
    angles.push_back(mean_angle);
  }
  CHECK(angles[1] < angles[0]);
  CHECK(angles[2] < angles[1]);
}

TEST_CASE("flipping the filter sign changes nothing observable") {
  Vector a = Vector::LinSpaced(4, 1.0, -0.5);
  const auto p = planted_epochs(a, 0.5, 100, 50, 8);
  const auto model = spoc::spoc_train(p.epochs, p.z, {8, 12});
  spoc::SpocModel flipped = model;
  flipped.w = -model.w;
  flipped.pattern = -model.pattern;
  const auto z1 = spoc::spoc_predict(model, p.epochs);
  const auto z2 = spoc::spoc_predict(flipped, p.epochs);
  for (std::size_t e = 0; e < z1.size(); ++e) CHECK(z1[e] == doctest::Approx(z2[e]).epsilon(1e-14));
  CHECK(spoc::pattern_angle(a, model.pattern) == doctest::Approx(spoc::pattern_angle(a, flipped.pattern)));
}

TEST_CASE("channel permutation permutes the filter and pattern") {
  Vector a(4);
  a << 1.0, 0.2, -0.6, 0.3;
  const auto p = planted_epochs(a, 0.6, 120, 60, 9);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
  perm.indices() << 2, 0, 3, 1;
  std::vector<Matrix> permuted;
  for (const auto& x : p.epochs.epochs) permuted.push_back(perm * x);
  const auto m1 = spoc::spoc_train(p.epochs, p.z, {8, 12});
  const auto m2 = spoc::spoc_train(make_epochs(permuted), p.z, {8, 12});
  CHECK((perm * m1.w - m2.w).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((perm * m1.pattern - m2.pattern).cwiseAbs().maxCoeff() < 1e-8);
  const auto z1 = spoc::spoc_predict(m1, p.epochs);
  const auto z2 = spoc::spoc_predict(m2, make_epochs(permuted));
  for (std::size_t e = 0; e < z1.size(); ++e) CHECK(z1[e] == doctest::Approx(z2[e]).epsilon(1e-8));
}

TEST_CASE("largest-magnitude rule picks a strongly negative component") {
  // Channel 0 power rises with z, channel 1 power falls much more strongly.
  Rng rng(10);
  std::vector<Matrix> blocks;
  std::vector<double> z;
  for (int e = 0; e < 300; ++e) {
    const double u = rng.uniform(0.0, 1.0);
    Matrix x(2, 100);
    x.row(0) = std::sqrt(1.0 + 0.2 * u) * random_matrix(rng, 1, 100);
    x.row(1) = std::sqrt(0.05 + 4.0 * (1.0 - u)) * random_matrix(rng, 1, 100);
    blocks.push_back(x);
    z.push_back(u);
  }
  const auto set = make_epochs(blocks);
  const auto signed_model = spoc::spoc_train(set, z, {8, 12});
  spoc::SpocOptions opts;
  opts.rule = spoc::ComponentRule::largest_magnitude;
  const auto magnitude_model = spoc::spoc_train(set, z, {8, 12}, opts);
  CHECK(signed_model.eigenvalue > 0.0);
  CHECK(magnitude_model.eigenvalue < 0.0);
  CHECK(std::abs(magnitude_model.w.normalized()(1)) > 0.99);
}

TEST_CASE("prediction is the variance of the filtered epoch") {
  spoc::SpocModel model;
  model.w = Vector::Unit(3, 0);
  Rng rng(11);
  const auto zero = make_epochs({Matrix::Zero(3, 100)});
  CHECK(spoc::spoc_predict(model, zero) == std::vector<double>{0.0});
  const auto noise = make_epochs({random_matrix(rng, 3, 20000)});
  CHECK(spoc::spoc_predict(model, noise)[0] == doctest::Approx(1.0).epsilon(0.03));
  const auto scaled = make_epochs({2.5 * noise.epochs[0]});
  CHECK(spoc::spoc_predict(model, scaled)[0] ==
        doctest::Approx(6.25 * spoc::spoc_predict(model, noise)[0]).epsilon(1e-12));
  CHECK_ERROR_CODE(spoc::spoc_predict(model, make_epochs({Matrix::Zero(2, 10)})), ErrorCode::shape_mismatch);
}

TEST_CASE("correlation metric") {
  const std::vector<double> z{1.0, 4.0, 2.0, 8.0, 5.0};
  std::vector<double> neg;
  std::vector<double> affine;
  for (double v : z) {
    neg.push_back(-v);
    affine.push_back(3.0 * v - 7.0);
  }
  CHECK(spoc::correlation_metric(z, z) == doctest::Approx(1.0));
  CHECK(spoc::correlation_metric(neg, z) == doctest::Approx(-1.0));
  CHECK(spoc::correlation_metric(affine, z) == doctest::Approx(1.0));
  CHECK_ERROR_CODE(spoc::correlation_metric(std::vector<double>(5, 1.0), z), ErrorCode::undefined_correlation);
  CHECK_ERROR_CODE(spoc::correlation_metric(std::vector<double>(4, 1.0), z), ErrorCode::shape_mismatch);
}

TEST_CASE("pattern angle is folded into [0, pi/2]") {
  Vector a(3);
  a << 1.0, 2.0, -1.0;
  CHECK(spoc::pattern_angle(a, a) == doctest::Approx(0.0));
  CHECK(spoc::pattern_angle(a, -a) == doctest::Approx(0.0));
  CHECK(spoc::pattern_angle(a, 4.0 * a) == doctest::Approx(0.0));
  Vector b(3);
  b << 2.0, -1.0, 0.0;
  CHECK(spoc::pattern_angle(a, b) == doctest::Approx(kPi / 2.0));
  Vector c(3);
  c << 1.0, 0.0, 0.0;
  const double expected = std::acos(1.0 / std::sqrt(6.0));
  CHECK(spoc::pattern_angle(a, c) == doctest::Approx(expected));
  CHECK(spoc::pattern_angle(a, -c) == doctest::Approx(expected));
  CHECK_ERROR_CODE(spoc::pattern_angle(a, Vector::Zero(3)), ErrorCode::invalid_pattern);
}
