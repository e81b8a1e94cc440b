#pragma once

#include <cstdint>
#include <span>

#include "pouw/protocol.hpp"

namespace pouw {

/// sum_i sum_j |x_i - x_j| / (2 n^2 mean). Throws Error(Empty), Error(AllZero),
/// Error(DomainError) on negative input.
double gini(std::span<const double> values);
/// Exact variant for integer data.
Rational gini_exact(std::span<const std::uint64_t> values);

/// Fraction of trials in which two independent uniform t-subsets of [m]
/// intersect. Trials are split into fixed chunks, each with its own seeded
/// stream, so the serial and OpenMP versions return identical results.
/// Throws Error(DomainError) unless m >= 2t >= 2 and trials >= 1.
double overlap_montecarlo(std::uint64_t m, std::uint64_t t, std::uint64_t trials, std::uint64_t seed);
double overlap_montecarlo_serial(std::uint64_t m, std::uint64_t t, std::uint64_t trials,
                                 std::uint64_t seed);

/// Stream seed for chunk or run `index` under a base seed (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};
/// Ordinary least squares y = slope * x + intercept. Throws
/// Error(DomainError) with fewer than two distinct x values.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace pouw
