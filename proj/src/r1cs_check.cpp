#include <cstddef>

#include "pouw/error.hpp"
#include "pouw/r1cs.hpp"

namespace pouw {

namespace {

inline std::uint64_t dot(const PrimeField& f, const LinearCombination& lc, const std::uint64_t* w) {
  std::uint64_t acc = 0;
  for (const auto& t : lc) acc = f.add(acc, f.mul(t.coeff, w[t.var]));
  return acc;
}

inline bool holds(const PrimeField& f, const Constraint& c, const std::uint64_t* w) {
  return f.mul(dot(f, c.a, w), dot(f, c.b, w)) == dot(f, c.c, w);
}

void validate(const R1CS& r1cs, const Witness& witness) {
  if (witness.values.size() != r1cs.n_vars) {
    throw Error(Errc::LengthMismatch, "witness has " + std::to_string(witness.values.size()) +
                                          " values, R1CS has " + std::to_string(r1cs.n_vars) +
                                          " variables");
  }
  if (witness.field != r1cs.field) throw Error(Errc::FieldMismatch, "witness field differs");
}

// Below this many constraints the fork/join cost dominates.
constexpr std::ptrdiff_t kParallelThreshold = 4096;

}  // namespace

bool check_satisfaction_serial(const R1CS& r1cs, const Witness& witness) {
  validate(r1cs, witness);
  const std::uint64_t* w = witness.values.data();
  for (const auto& c : r1cs.constraints) {
    if (!holds(r1cs.field, c, w)) return false;
  }
  return true;
}

bool check_satisfaction(const R1CS& r1cs, const Witness& witness) {
  validate(r1cs, witness);
  const std::uint64_t* w = witness.values.data();
  const PrimeField f = r1cs.field;
  const Constraint* cs = r1cs.constraints.data();
  const auto n = static_cast<std::ptrdiff_t>(r1cs.constraints.size());
  int ok = 1;
#pragma omp parallel for schedule(static) reduction(&& : ok) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ok = ok && holds(f, cs[i], w);
  }
  return ok != 0;
}

}  // namespace pouw
