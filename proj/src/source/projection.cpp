#include "phlb/error.hpp"
#include "phlb/source/source_space.hpp"

#include <algorithm>
#include <numeric>

namespace phlb::source {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

TimeSeriesMatrix project(const Projection& projection, const TimeSeriesMatrix& x) {
  return std::visit(overloaded{[&](const InverseOperator& op) { return apply_inverse(op, x); },
                               [&](const UnmixingModel& m) { return apply_unmixing(m, x); }},
                    projection);
}

Eigen::Index source_count(const Projection& projection) {
  return std::visit(overloaded{[](const InverseOperator& op) { return op.m.rows(); },
                               [](const UnmixingModel& m) { return m.phi.rows(); }},
                    projection);
}

Eigen::Index channel_count(const Projection& projection) {
  return std::visit(overloaded{[](const InverseOperator& op) { return op.m.cols(); },
                               [](const UnmixingModel& m) { return m.phi.cols(); }},
                    projection);
}

Vector source_pattern(const Projection& projection, Eigen::Index source) {
  if (source < 0 || source >= source_count(projection)) {
    fail(ErrorCode::invalid_index, "source_pattern: source index out of range");
  }
  return std::visit(
      overloaded{[&](const InverseOperator& op) -> Vector { return op.lead_field.pattern(source); },
                 [&](const UnmixingModel& m) -> Vector { return m.mixing.col(source); }},
      projection);
}

std::string projection_name(const Projection& projection) {
  return std::holds_alternative<InverseOperator>(projection) ? "anatomical" : "data-driven";
}

std::vector<double> relative_source_power(const TimeSeriesMatrix& s, PowerScale scale) {
  const Eigen::Index n = s.n_channels();
  if (n < 2) fail(ErrorCode::degenerate_ranking, "relative_source_power: needs >= 2 sources");
  const Matrix centred = s.data().colwise() - s.data().rowwise().mean();
  const Vector var = centred.rowwise().squaredNorm() / static_cast<double>(s.n_samples());

  std::vector<double> out(static_cast<std::size_t>(n));
  if (scale == PowerScale::linear) {
    const double lo = var.minCoeff();
    const double span = var.maxCoeff() - lo;
    for (Eigen::Index i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = span > 0.0 ? (var(i) - lo) / span : 0.0;
    }
    return out;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return var(a) < var(b); });
  for (Eigen::Index r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
        static_cast<double>(r) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace phlb::source
