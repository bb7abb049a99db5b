#include "fermi_slab/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "fermi_slab/errors.hpp"
#include "fermi_slab/parallel.hpp"

namespace fslab {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kLanes = 8;
constexpr int kMaxInverseIterations = 6;
constexpr double kDegenerateGap = 1e-10;  // relative to scale
constexpr double kOrthogonalizeGap = 1e-8;  // relative to scale

struct Sturm {
  std::span<const double> d;
  double e2;
  double pivmin;
};

Sturm make_sturm(const FiberHamiltonian& H) {
  const double e2 = H.off_diagonal() * H.off_diagonal();
  return {H.diagonal(), e2, std::numeric_limits<double>::min() * std::max(1.0, e2)};
}

int count_below(const Sturm& s, double x) {
  const std::size_t m = s.d.size();
  double q = s.d[0] - x;
  if (std::abs(q) < s.pivmin) q = -s.pivmin;
  int c = q < 0.0 ? 1 : 0;
  for (std::size_t i = 1; i < m; ++i) {
    q = s.d[i] - x - s.e2 / q;
    if (std::abs(q) < s.pivmin) q = -s.pivmin;
    c += q < 0.0 ? 1 : 0;
  }
  return c;
}

// Eight interleaved Sturm recurrences; hides the division latency.
void count_below_batch(const Sturm& s, const double* x, int* out) {
  const std::size_t m = s.d.size();
  double q[kLanes];
  int c[kLanes];
  for (int l = 0; l < kLanes; ++l) {
    double t = s.d[0] - x[l];
    t = std::abs(t) < s.pivmin ? -s.pivmin : t;
    q[l] = t;
    c[l] = t < 0.0 ? 1 : 0;
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double di = s.d[i];
    for (int l = 0; l < kLanes; ++l) {
      double t = di - x[l] - s.e2 / q[l];
      t = std::abs(t) < s.pivmin ? -s.pivmin : t;
      q[l] = t;
      c[l] += t < 0.0 ? 1 : 0;
    }
  }
  for (int l = 0; l < kLanes; ++l) out[l] = c[l];
}

struct Bracket {
  double lo;
  double hi;
  int first;  // global index of the lowest eigenvalue inside
  int count;
};

// Tridiagonal (T - sigma I) factored with partial pivoting; U has two
// super-diagonals.
class PivotedTridiagonalLU {
public:
  PivotedTridiagonalLU(std::span<const double> d, double e, double sigma, double tiny)
      : u0_(d.size()), u1_(d.size(), 0.0), u2_(d.size(), 0.0), mult_(d.size(), 0.0),
        swapped_(d.size(), 0) {
    const std::size_t m = d.size();
    double r0 = d[0] - sigma;
    double r1 = m > 1 ? e : 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double below_diag = d[i + 1] - sigma;
      const double below_sup = i + 2 < m ? e : 0.0;
      if (std::abs(r0) >= std::abs(e)) {
        const double pivot = r0 == 0.0 ? tiny : r0;
        u0_[i] = pivot;
        u1_[i] = r1;
        u2_[i] = 0.0;
        mult_[i] = e / pivot;
        r0 = below_diag - mult_[i] * r1;
        r1 = below_sup;
      } else {
        swapped_[i] = 1;
        u0_[i] = e;
        u1_[i] = below_diag;
        u2_[i] = below_sup;
        mult_[i] = r0 / e;
        const double next0 = r1 - mult_[i] * below_diag;
        const double next1 = -mult_[i] * below_sup;
        r0 = next0;
        r1 = next1;
      }
    }
    u0_[m - 1] = std::abs(r0) < tiny ? (r0 < 0.0 ? -tiny : tiny) : r0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (std::abs(u0_[i]) < tiny) u0_[i] = u0_[i] < 0.0 ? -tiny : tiny;
    }
  }

  void solve(std::span<double> b) const {
    const std::size_t m = b.size();
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (swapped_[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= mult_[i] * b[i];
    }
    for (std::size_t k = m; k-- > 0;) {
      double v = b[k];
      if (k + 1 < m) v -= u1_[k] * b[k + 1];
      if (k + 2 < m) v -= u2_[k] * b[k + 2];
      b[k] = v / u0_[k];
    }
  }

private:
  std::vector<double> u0_, u1_, u2_, mult_;
  std::vector<char> swapped_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void start_vector(int index, std::span<double> b) {
  std::uint64_t state = splitmix64(static_cast<std::uint64_t>(index) + 1);
  for (auto& v : b) {
    state = splitmix64(state);
    v = static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double residual_inf(const FiberHamiltonian& H, std::span<const double> x, double lambda,
                    std::vector<double>& work) {
  work.resize(x.size());
  H.apply(x, work);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(work[i] - lambda * x[i]));
  return r;
}

void fix_sign(std::span<double> x) {
  double big = 0.0;
  for (double v : x) big = std::max(big, std::abs(v));
  for (double v : x) {
    if (std::abs(v) >= 0.5 * big) {
      if (v < 0.0) {
        for (auto& w : x) w = -w;
      }
      return;
    }
  }
}

// Inverse iteration for one group of close eigenvalues [begin, end).
// Vectors are written as unit Euclidean vectors on the interior.
// Returns true if the dense Rayleigh-Ritz repair was applied.
bool solve_group(const FiberHamiltonian& H, std::span<const double> eigenvalues, int begin, int end,
                 bool degenerate, std::vector<std::vector<double>>& vectors) {
  const auto m = static_cast<std::size_t>(H.dimension());
  const double scale = H.scale();
  const double tiny = kEps * scale;
  const double h = H.grid().spacing();
  std::vector<double> work;
  bool needs_repair = degenerate;
  double previous_shift = -std::numeric_limits<double>::infinity();

  for (int j = begin; j < end; ++j) {
    auto& x = vectors[static_cast<std::size_t>(j - begin)];
    x.assign(m, 0.0);
    const double lambda = eigenvalues[static_cast<std::size_t>(j)];
    double shift = lambda;
    if (shift - previous_shift < 10.0 * kEps * scale) shift = previous_shift + 10.0 * kEps * scale;
    previous_shift = shift;

    const PivotedTridiagonalLU lu(H.diagonal(), H.off_diagonal(), shift, tiny);
    start_vector(j, x);
    // grid-normalized residual bound, expressed for unit Euclidean vectors
    const double target = 1e-13 * (std::abs(lambda) + 2.0 / (h * h)) * std::sqrt(h);
    bool converged = false;
    for (int it = 0; it < kMaxInverseIterations; ++it) {
      lu.solve(x);
      for (int k = begin; k < j; ++k) {
        const auto& y = vectors[static_cast<std::size_t>(k - begin)];
        const double p = dot(x, y);
        for (std::size_t i = 0; i < m; ++i) x[i] -= p * y[i];
      }
      const double norm = std::sqrt(dot(x, x));
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        start_vector(j + 7919 * (it + 1), x);
        continue;
      }
      for (auto& v : x) v /= norm;
      if (it >= 1 && residual_inf(H, x, lambda, work) <= target) {
        converged = true;
        break;
      }
    }
    if (!converged) needs_repair = true;
  }

  if (!needs_repair) return false;

  // Rayleigh-Ritz on the span of the group's vectors.
  const int g = end - begin;
  for (int a = 0; a < g; ++a) {  // re-orthonormalize first
    auto& x = vectors[static_cast<std::size_t>(a)];
    for (int b = 0; b < a; ++b) {
      const auto& y = vectors[static_cast<std::size_t>(b)];
      const double p = dot(x, y);
      for (std::size_t i = 0; i < m; ++i) x[i] -= p * y[i];
    }
    const double norm = std::sqrt(dot(x, x));
    for (auto& v : x) v /= norm;
  }
  Eigen::MatrixXd S(g, g);
  std::vector<std::vector<double>> hx(static_cast<std::size_t>(g), std::vector<double>(m));
  for (int a = 0; a < g; ++a) H.apply(vectors[static_cast<std::size_t>(a)], hx[static_cast<std::size_t>(a)]);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b <= a; ++b) {
      const double v = dot(vectors[static_cast<std::size_t>(a)], hx[static_cast<std::size_t>(b)]);
      S(a, b) = v;
      S(b, a) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(S);
  const Eigen::MatrixXd& U = ritz.eigenvectors();
  std::vector<std::vector<double>> rotated(static_cast<std::size_t>(g), std::vector<double>(m, 0.0));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double c = U(b, a);
      const auto& src = vectors[static_cast<std::size_t>(b)];
      auto& dst = rotated[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < m; ++i) dst[i] += c * src[i];
    }
  }
  vectors = std::move(rotated);
  for (int a = 0; a < g; ++a) {
    const double lambda = eigenvalues[static_cast<std::size_t>(begin + a)];
    const double bound = 1e-10 * (std::abs(lambda) + 2.0 / (h * h)) * std::sqrt(h);
    if (residual_inf(H, vectors[static_cast<std::size_t>(a)], lambda, work) > bound) {
      throw SpectralFailure("inverse iteration stagnated for eigenvalue " + std::to_string(lambda) +
                            " and the dense cluster fallback did not recover it");
    }
  }
  return true;
}

}  // namespace

FiberHamiltonian::FiberHamiltonian(const GridSpec& grid, PotentialProfile potential)
    : potential_(std::move(potential)), off_diagonal_(0.0) {
  require_same_grid(grid, potential_.grid(), "build_hamiltonian");
  const double h = grid.spacing();
  const int n = grid.size();
  diagonal_.resize(static_cast<std::size_t>(n - 2));
  for (int i = 1; i < n - 1; ++i) diagonal_[static_cast<std::size_t>(i - 1)] = 1.0 / (h * h) + potential_[i];
  off_diagonal_ = -0.5 / (h * h);
}

std::pair<double, double> FiberHamiltonian::gershgorin_bounds() const noexcept {
  const double radius = 2.0 * std::abs(off_diagonal_);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < diagonal_.size(); ++i) {
    // end rows only have one neighbour
    const double r = (i == 0 || i + 1 == diagonal_.size()) ? 0.5 * radius : radius;
    lo = std::min(lo, diagonal_[i] - r);
    hi = std::max(hi, diagonal_[i] + r);
  }
  return {lo, hi};
}

double FiberHamiltonian::scale() const noexcept {
  const auto [lo, hi] = gershgorin_bounds();
  return std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
}

void FiberHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = diagonal_.size();
  for (std::size_t i = 0; i < m; ++i) {
    double v = diagonal_[i] * x[i];
    if (i > 0) v += off_diagonal_ * x[i - 1];
    if (i + 1 < m) v += off_diagonal_ * x[i + 1];
    y[i] = v;
  }
}

FiberHamiltonian build_hamiltonian(const GridSpec& grid, const PotentialProfile& V) {
  return FiberHamiltonian(grid, V);
}

int sturm_count(const FiberHamiltonian& H, double x) {
  return count_below(make_sturm(H), x);
}

int count_at_or_below(const FiberHamiltonian& H, double x) {
  return count_below(make_sturm(H), std::nextafter(x, std::numeric_limits<double>::infinity()));
}

SpectralDecomposition::SpectralDecomposition(GridSpec grid, double cutoff, std::vector<double> eigenvalues,
                                             std::vector<double> eigenvectors, int cluster_fallbacks)
    : grid_(grid), cutoff_(cutoff), eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)), cluster_fallbacks_(cluster_fallbacks) {
  if (eigenvectors_.size() != eigenvalues_.size() * static_cast<std::size_t>(grid_.size())) {
    throw InvalidArgument("spectral decomposition: eigenvector storage does not match count x grid size");
  }
}

std::span<const double> SpectralDecomposition::eigenvector(int j) const noexcept {
  const auto n = static_cast<std::size_t>(grid_.size());
  return std::span<const double>(eigenvectors_).subspan(static_cast<std::size_t>(j) * n, n);
}

SpectralDecomposition eigendecompose(const FiberHamiltonian& H, double cutoff) {
  if (!std::isfinite(cutoff)) throw InvalidArgument("eigendecompose: cutoff must be finite");
  const GridSpec& grid = H.grid();
  const Sturm sturm = make_sturm(H);
  const auto [glo, ghi] = H.gershgorin_bounds();
  const double scale = H.scale();
  const double abs_tol = kEps * scale;

  const double lo0 = glo - 4.0 * abs_tol;
  const double hi0 = std::min(std::nextafter(cutoff, std::numeric_limits<double>::infinity()),
                              ghi + 4.0 * abs_tol);
  if (!(hi0 > lo0)) return SpectralDecomposition(grid, cutoff, {}, {});

  const int c_lo = count_below(sturm, lo0);
  const int c_hi = count_below(sturm, hi0);
  const int total = c_hi;
  if (total == 0) return SpectralDecomposition(grid, cutoff, {}, {});

  auto tolerance = [&](double lo, double hi) {
    return std::max(abs_tol, 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)));
  };

  // Split [lo0, hi0] until each bracket holds one eigenvalue (or a cluster
  // narrower than the tolerance).
  std::vector<Bracket> singles;
  std::vector<Bracket> clusters;
  std::vector<Bracket> stack{{lo0, hi0, c_lo, c_hi - c_lo}};
  while (!stack.empty()) {
    const Bracket b = stack.back();
    stack.pop_back();
    if (b.count == 0) continue;
    if (b.hi - b.lo <= tolerance(b.lo, b.hi)) {
      (b.count == 1 ? singles : clusters).push_back(b);
      continue;
    }
    if (b.count == 1) {
      singles.push_back(b);
      continue;
    }
    const double mid = 0.5 * (b.lo + b.hi);
    const int c_mid = count_below(sturm, mid);
    stack.push_back({mid, b.hi, c_mid, b.first + b.count - c_mid});
    stack.push_back({b.lo, mid, b.first, c_mid - b.first});
  }

  std::vector<double> eigenvalues(static_cast<std::size_t>(total), 0.0);
  for (const auto& b : clusters) {
    for (int k = 0; k < b.count; ++k) eigenvalues[static_cast<std::size_t>(b.first + k)] = 0.5 * (b.lo + b.hi);
  }

  const int n_batches = (static_cast<int>(singles.size()) + kLanes - 1) / kLanes;
  parallel_for(n_batches, [&](int batch_begin, int batch_end) {
    for (int batch = batch_begin; batch < batch_end; ++batch) {
      double lo[kLanes], hi[kLanes], mid[kLanes];
      int target[kLanes], counts[kLanes];
      const int first = batch * kLanes;
      const int used = std::min(kLanes, static_cast<int>(singles.size()) - first);
      for (int l = 0; l < kLanes; ++l) {
        const Bracket& b = singles[static_cast<std::size_t>(first + std::min(l, used - 1))];
        lo[l] = b.lo;
        hi[l] = b.hi;
        target[l] = b.first;
      }
      for (;;) {
        bool done = true;
        for (int l = 0; l < used; ++l) done = done && (hi[l] - lo[l] <= tolerance(lo[l], hi[l]));
        if (done) break;
        for (int l = 0; l < kLanes; ++l) mid[l] = 0.5 * (lo[l] + hi[l]);
        count_below_batch(sturm, mid, counts);
        for (int l = 0; l < kLanes; ++l) {
          if (hi[l] - lo[l] <= tolerance(lo[l], hi[l])) continue;
          if (counts[l] > target[l]) {
            hi[l] = mid[l];
          } else {
            lo[l] = mid[l];
          }
        }
      }
      for (int l = 0; l < used; ++l) eigenvalues[static_cast<std::size_t>(target[l])] = 0.5 * (lo[l] + hi[l]);
    }
  });

  // Groups of consecutive eigenvalues that must be orthogonalized together.
  struct Group {
    int begin;
    int end;
    bool degenerate;
  };
  std::vector<Group> groups;
  for (int j = 0; j < total;) {
    int k = j + 1;
    bool degenerate = false;
    while (k < total) {
      const double gap = eigenvalues[static_cast<std::size_t>(k)] - eigenvalues[static_cast<std::size_t>(k - 1)];
      if (gap >= kOrthogonalizeGap * scale) break;
      degenerate = degenerate || gap < kDegenerateGap * scale;
      ++k;
    }
    groups.push_back({j, k, degenerate});
    j = k;
  }

  const auto n = static_cast<std::size_t>(grid.size());
  const double inv_sqrt_h = 1.0 / std::sqrt(grid.spacing());
  std::vector<double> vectors(static_cast<std::size_t>(total) * n, 0.0);
  std::vector<int> repaired(groups.size(), 0);
  parallel_for(static_cast<int>(groups.size()), [&](int gb, int ge) {
    std::vector<std::vector<double>> local;
    for (int gi = gb; gi < ge; ++gi) {
      const Group& grp = groups[static_cast<std::size_t>(gi)];
      local.assign(static_cast<std::size_t>(grp.end - grp.begin), {});
      repaired[static_cast<std::size_t>(gi)] =
          solve_group(H, eigenvalues, grp.begin, grp.end, grp.degenerate, local) ? 1 : 0;
      for (int j = grp.begin; j < grp.end; ++j) {
        auto& x = local[static_cast<std::size_t>(j - grp.begin)];
        fix_sign(x);
        double* dst = vectors.data() + static_cast<std::size_t>(j) * n;
        for (std::size_t i = 0; i < x.size(); ++i) dst[i + 1] = x[i] * inv_sqrt_h;
      }
    }
  });
  int fallbacks = 0;
  for (int r : repaired) fallbacks += r;

  return SpectralDecomposition(grid, cutoff, std::move(eigenvalues), std::move(vectors), fallbacks);
}

}  // namespace fslab
