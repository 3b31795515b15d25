#include "phlb/error.hpp"
#include "phlb/source/source_space.hpp"

#include <Eigen/Cholesky>

#include <sstream>

namespace phlb::source {

InverseOperator mne_inverse_operator(const LeadField& a, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::invalid_regularization, "mne_inverse_operator: lambda must be positive");
  }
  const Matrix& A = a.matrix();
  Matrix gram = A * A.transpose();
  gram.diagonal().array() += lambda;
  // M = A^T K^-1 = (K^-1 A)^T since K is symmetric.
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::invalid_regularization, "mne_inverse_operator: lambda I + A A^T not SPD");
  }
  InverseOperator op;
  op.m = llt.solve(A).transpose();
  op.lambda = lambda;
  op.lead_field = a;
  return op;
}

TimeSeriesMatrix apply_inverse(const InverseOperator& op, const TimeSeriesMatrix& x) {
  if (op.m.cols() != x.n_channels()) {
    std::ostringstream msg;
    msg << "apply_inverse: operator expects " << op.m.cols() << " channels, got " << x.n_channels();
    fail(ErrorCode::shape_mismatch, msg.str());
  }
  return TimeSeriesMatrix(op.m * x.data(), x.sample_rate_hz(),
                          default_channel_labels(op.m.rows(), "S"));
}

}  // namespace phlb::source
