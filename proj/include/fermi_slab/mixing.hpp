#pragma once

#include <deque>
#include <span>
#include <vector>

namespace fslab {

/// Anderson acceleration (type II) of the fixed-point map x -> g(x), fed
/// with residuals f = g(x) - x. depth 0 is plain linear mixing
/// x + alpha f.
class AndersonMixer {
public:
  AndersonMixer(double alpha, int depth);

  std::vector<double> next(std::span<const double> x, std::span<const double> f);
  void reset();
  int history_size() const noexcept { return static_cast<int>(xs_.size()); }

private:
  double alpha_;
  int depth_;
  std::deque<std::vector<double>> xs_;
  std::deque<std::vector<double>> fs_;
};

}  // namespace fslab
