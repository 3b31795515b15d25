#include "phlb/error.hpp"
#include "phlb/random.hpp"
#include "phlb/source/source_space.hpp"

#include <cmath>
#include <numbers>

namespace phlb::source {

LeadField::LeadField(Matrix a, std::vector<std::string> channel_labels)
    : a_(std::move(a)), labels_(std::move(channel_labels)) {
  if (a_.rows() < 1 || a_.cols() < 1) fail(ErrorCode::invalid_size, "LeadField: empty matrix");
  if (!a_.allFinite()) fail(ErrorCode::invalid_size, "LeadField: non-finite entries");
  for (Eigen::Index j = 0; j < a_.cols(); ++j) {
    if (a_.col(j).cwiseAbs().maxCoeff() == 0.0) {
      fail(ErrorCode::invalid_size, "LeadField: column " + std::to_string(j) + " is all zero");
    }
  }
  if (labels_.empty()) {
    labels_ = default_channel_labels(a_.rows());
  } else if (static_cast<Eigen::Index>(labels_.size()) != a_.rows()) {
    fail(ErrorCode::shape_mismatch, "LeadField: one label per channel required");
  }
}

Vector LeadField::pattern(Eigen::Index source) const {
  if (source < 0 || source >= n_sources()) {
    fail(ErrorCode::invalid_index, "LeadField::pattern: source index out of range");
  }
  return a_.col(source);
}

LeadField LeadField::common_average_referenced() const {
  Matrix out = a_.rowwise() - a_.colwise().mean();
  return LeadField(std::move(out), labels_);
}

LeadField synth_lead_field(Eigen::Index n_channels, Eigen::Index n_sources, std::uint64_t seed) {
  if (n_channels < 2 || n_sources < 1) {
    fail(ErrorCode::invalid_size, "synth_lead_field: need >= 2 channels and >= 1 source");
  }
  // Fibonacci lattice on the upper hemisphere as a stand-in montage.
  Matrix pos(3, n_channels);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (Eigen::Index i = 0; i < n_channels; ++i) {
    const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n_channels);
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * static_cast<double>(i);
    pos.col(i) << r * std::cos(phi), r * std::sin(phi), z;
  }
  constexpr double width = 0.5;
  Matrix kernel(n_channels, n_channels);
  for (Eigen::Index i = 0; i < n_channels; ++i) {
    for (Eigen::Index j = 0; j < n_channels; ++j) {
      const double d2 = (pos.col(i) - pos.col(j)).squaredNorm();
      kernel(i, j) = std::exp(-d2 / (2.0 * width * width));
    }
  }

  Rng rng(seed);
  Matrix a(n_channels, n_sources);
  for (Eigen::Index j = 0; j < n_sources; ++j) {
    Vector v(n_channels);
    for (Eigen::Index i = 0; i < n_channels; ++i) v(i) = rng.normal();
    v /= v.norm();
    Vector col = kernel * v;
    a.col(j) = col / col.norm();
  }
  return LeadField(std::move(a));
}

}  // namespace phlb::source
