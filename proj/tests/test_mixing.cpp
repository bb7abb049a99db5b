#include <doctest.h>

#include <cmath>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/mixing.hpp"

using namespace fslab;

TEST_SUITE("mixing") {
  TEST_CASE("depth 0 is linear mixing") {
    AndersonMixer mix(0.3, 0);
    const std::vector<double> x{1.0, -2.0, 0.5};
    const std::vector<double> f{0.1, 0.2, -0.4};
    for (int k = 0; k < 3; ++k) {
      const auto y = mix.next(x, f);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i] + 0.3 * f[i]).epsilon(1e-15));
    }
    CHECK(mix.history_size() <= 1);
  }

  TEST_CASE("first Anderson step is linear mixing") {
    AndersonMixer mix(0.5, 4);
    const auto y = mix.next(std::vector<double>{1.0, 1.0}, std::vector<double>{-1.0, 2.0});
    CHECK(y[0] == doctest::Approx(0.5));
    CHECK(y[1] == doctest::Approx(2.0));
  }

  TEST_CASE("Anderson solves a linear contraction faster than linear mixing") {
    // g(x) = M x + b with a diagonal M of spectral radius 0.9
    const std::vector<double> diag{0.9, -0.5, 0.3, 0.8, 0.1};
    const std::vector<double> b{1.0, 2.0, -1.0, 0.5, 3.0};
    auto run = [&](int depth) {
      AndersonMixer mix(0.3, depth);
      std::vector<double> x(5, 0.0), f(5);
      for (int it = 1; it <= 500; ++it) {
        double res = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
          f[i] = diag[i] * x[i] + b[i] - x[i];
          res = std::max(res, std::abs(f[i]));
        }
        if (res < 1e-12) return it;
        x = mix.next(x, f);
      }
      return 501;
    };
    const int linear = run(0);
    const int anderson = run(5);
    CHECK(anderson < 20);
    CHECK(anderson < linear);
  }

  TEST_CASE("reset and bad parameters") {
    AndersonMixer mix(0.3, 3);
    std::vector<double> x{0.0}, f{1.0};
    for (int k = 0; k < 5; ++k) {
      x = mix.next(x, f);
      f[0] *= 0.5;
    }
    CHECK(mix.history_size() > 0);
    mix.reset();
    CHECK(mix.history_size() == 0);
    CHECK_THROWS_AS(AndersonMixer(0.0, 2), InvalidArgument);
    CHECK_THROWS_AS(AndersonMixer(0.3, -1), InvalidArgument);
  }
}
