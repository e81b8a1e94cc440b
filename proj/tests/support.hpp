#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pouw/field.hpp"

namespace pouw::test {

inline const std::string kFactorSource = R"(def main(
    private field factor1,
    private field factor2,
    public field product,
    public u32 integrity
) -> bool {
    assert(integrity != 0); // Dummy utilization
    assert(factor1 * factor2 == product);
    return true;
})";

inline const std::string kFactorBaseSource = R"(def main(private field factor1, private field factor2, public field product) -> bool {
    assert(factor1 * factor2 == product);
    return true;
})";

inline const std::string kTautologySource = "def main(public field x) -> bool { assert(x == x); return true; }";

inline const std::string kTripleSource = R"(def main(private field a, private field b, private field c, public field d) -> bool {
    assert(a * b * c == d);
    return true;
})";

/// Circuits without an `integrity` parameter, used wherever the WOO
/// transform needs an input: no privates, outputs, mixed shapes.
inline std::vector<std::string> woo_corpus() {
  return {
      kFactorBaseSource,
      kTripleSource,
      "def main(public field x) -> bool { assert(x * x == 9); return true; }",
      R"(def main(private field x, public field y) -> bool {
    field out_square = x * x;
    field cube = out_square * x;
    assert(cube + x + 5 == y);
    return true;
})",
      R"(def main(private field a, private field b, private field fee, public field total) -> bool {
    assert(a + b + fee == total);
    assert(fee != 0);
    field out_rest = total - fee;
    field out_scaled = a * b;
    return true;
})",
  };
}

struct CorpusInputs {
  std::vector<std::uint64_t> pub;
  std::vector<std::uint64_t> priv;
};

/// Random satisfying inputs for woo_corpus()[index], computed directly in
/// the field rather than through the compiler.
inline CorpusInputs corpus_inputs(std::size_t index, const PrimeField& f, std::mt19937_64& rng) {
  auto r = [&] { return f.reduce(rng()); };
  auto nz = [&] {
    std::uint64_t v = 0;
    while (v == 0) v = r();
    return v;
  };
  switch (index) {
    case 0: {
      const auto a = r(), b = r();
      return {{f.mul(a, b)}, {a, b}};
    }
    case 1: {
      const auto a = r(), b = r(), c = r();
      return {{f.mul(f.mul(a, b), c)}, {a, b, c}};
    }
    case 2:
      return {{rng() % 2 ? std::uint64_t{3} : f.modulus() - 3}, {}};
    case 3: {
      const auto x = r();
      return {{f.add(f.add(f.mul(f.mul(x, x), x), x), 5)}, {x}};
    }
    default: {
      const auto a = r(), b = r(), fee = nz();
      return {{f.add(f.add(a, b), fee)}, {a, b, fee}};
    }
  }
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("pouw-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace pouw::test
