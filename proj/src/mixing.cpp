#include "fermi_slab/mixing.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "fermi_slab/errors.hpp"

namespace fslab {

AndersonMixer::AndersonMixer(double alpha, int depth) : alpha_(alpha), depth_(depth) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("mixing alpha must lie in (0, 1]");
  if (depth < 0) throw InvalidArgument("anderson depth must be >= 0");
}

void AndersonMixer::reset() {
  xs_.clear();
  fs_.clear();
}

std::vector<double> AndersonMixer::next(std::span<const double> x, std::span<const double> f) {
  const auto n = x.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + alpha_ * f[i];
  if (depth_ == 0) return out;

  xs_.emplace_back(x.begin(), x.end());
  fs_.emplace_back(f.begin(), f.end());
  while (static_cast<int>(xs_.size()) > depth_ + 1) {
    xs_.pop_front();
    fs_.pop_front();
  }
  const int k = static_cast<int>(xs_.size()) - 1;
  if (k == 0) return out;

  Eigen::MatrixXd dX(static_cast<Eigen::Index>(n), k), dF(static_cast<Eigen::Index>(n), k);
  for (int c = 0; c < k; ++c) {
    const auto& x0 = xs_[static_cast<std::size_t>(c)];
    const auto& x1 = xs_[static_cast<std::size_t>(c + 1)];
    const auto& f0 = fs_[static_cast<std::size_t>(c)];
    const auto& f1 = fs_[static_cast<std::size_t>(c + 1)];
    for (std::size_t i = 0; i < n; ++i) {
      dX(static_cast<Eigen::Index>(i), c) = x1[i] - x0[i];
      dF(static_cast<Eigen::Index>(i), c) = f1[i] - f0[i];
    }
  }
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(n));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> lsq(dF);
  lsq.setThreshold(1e-12);
  const Eigen::VectorXd gamma = lsq.solve(fv);
  if (!gamma.allFinite()) {
    reset();
    return out;
  }
  const Eigen::VectorXd correction = (dX + alpha_ * dF) * gamma;
  for (std::size_t i = 0; i < n; ++i) out[i] -= correction(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace fslab
