#include "pouw/stats.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "pouw/error.hpp"

namespace pouw {

double gini(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::Empty, "gini of an empty sample");
  if (std::any_of(values.begin(), values.end(), [](double v) { return v < 0; })) {
    throw Error(Errc::DomainError, "gini needs non-negative values");
  }
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total == 0) throw Error(Errc::AllZero, "gini of an all-zero sample");
  // With ascending x: sum_ij |x_i - x_j| = 2 sum_i (2i - n + 1) x_i.
  const double n = static_cast<double>(x.size());
  double weighted = 0;
  for (std::size_t i = 0; i < x.size(); ++i) weighted += (2.0 * static_cast<double>(i) - n + 1) * x[i];
  return weighted / (n * total);
}

Rational gini_exact(std::span<const std::uint64_t> values) {
  if (values.empty()) throw Error(Errc::Empty, "gini of an empty sample");
  std::vector<std::uint64_t> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  BigInt total = 0;
  BigInt weighted = 0;
  const long long n = static_cast<long long>(x.size());
  for (long long i = 0; i < n; ++i) {
    total += x[static_cast<std::size_t>(i)];
    weighted += BigInt(2 * i - n + 1) * x[static_cast<std::size_t>(i)];
  }
  if (total == 0) throw Error(Errc::AllZero, "gini of an all-zero sample");
  return Rational(weighted, BigInt(n) * total);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kChunk = 1 << 14;

void check_overlap_args(std::uint64_t m, std::uint64_t t, std::uint64_t trials) {
  if (t < 1 || m < 2 * t || trials < 1) {
    throw Error(Errc::DomainError, "overlap sampling needs m >= 2t >= 2 and trials >= 1");
  }
}

/// Hits within one chunk. Floyd's algorithm draws each subset; the stamp
/// arrays mark members by trial number so they never need clearing.
std::uint64_t overlap_chunk(std::uint64_t m, std::uint64_t t, std::uint64_t count, std::uint64_t seed,
                            std::vector<std::uint64_t>& stamp, std::vector<std::uint64_t>& pick) {
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < count; ++trial) {
    const std::uint64_t mark = trial + 1;
    for (std::uint64_t j = m - t; j < m; ++j) {
      std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
      stamp[stamp[r] == mark ? j : r] = mark;
    }
    bool hit = false;
    for (std::uint64_t j = m - t; j < m; ++j) {
      std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
      std::uint64_t chosen = pick[r] == mark ? j : r;
      pick[chosen] = mark;
      hit = hit || stamp[chosen] == mark;
    }
    hits += hit;
  }
  return hits;
}

}  // namespace

double overlap_montecarlo_serial(std::uint64_t m, std::uint64_t t, std::uint64_t trials, std::uint64_t seed) {
  check_overlap_args(m, t, trials);
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> stamp(m), pick(m);
  std::uint64_t hits = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    std::fill(stamp.begin(), stamp.end(), 0);
    std::fill(pick.begin(), pick.end(), 0);
    hits += overlap_chunk(m, t, std::min(kChunk, trials - c * kChunk), derive_seed(seed, c), stamp, pick);
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double overlap_montecarlo(std::uint64_t m, std::uint64_t t, std::uint64_t trials, std::uint64_t seed) {
  check_overlap_args(m, t, trials);
  const std::int64_t chunks = static_cast<std::int64_t>((trials + kChunk - 1) / kChunk);
  std::uint64_t hits = 0;
#pragma omp parallel reduction(+ : hits)
  {
    std::vector<std::uint64_t> stamp(m), pick(m);
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const auto uc = static_cast<std::uint64_t>(c);
      std::fill(stamp.begin(), stamp.end(), 0);
      std::fill(pick.begin(), pick.end(), 0);
      hits += overlap_chunk(m, t, std::min(kChunk, trials - uc * kChunk), derive_seed(seed, uc), stamp, pick);
    }
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::DomainError, "least squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(Errc::DomainError, "least squares needs two distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

}  // namespace pouw
