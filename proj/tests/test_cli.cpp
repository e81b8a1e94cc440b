#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pouw/circuit.hpp"
#include "pouw/cli.hpp"
#include "pouw/csv.hpp"
#include "support.hpp"

using namespace pouw;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pouw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path write_file(const test::TempDir& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

const std::string kCubic = R"(def main(private field x, public field y) -> bool {
    field out_square = x * x;
    field cube = out_square * x;
    assert(cube + x + 5 == y);
    return true;
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run({"experiment", "h9"}).code == cli::kExitUsage);
    CHECK(run({"sim", "run", "--psi", "-1", "--blocks", "10"}).code == cli::kExitUsage);
    CHECK(run({"--config", "/nonexistent/config.toml", "sim", "run"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
  }

  TEST_CASE("circuit compile and check") {
    test::TempDir dir("cli-circuit");
    const auto src = write_file(dir, "factor.zk", test::kFactorSource);
    const std::string out = (dir / "out").string();

    const Result c = run({"--out", out, "circuit", "compile", src.string()});
    CHECK(c.code == 0);
    CHECK(contains(c.out, "constraints: 2\n"));
    CHECK(contains(c.out, "circuit_id: " + to_hex(circuit_id(test::kFactorSource))));
    const auto r1cs = nlohmann::json::parse(slurp(dir / "out/factor.r1cs.json"));
    CHECK(r1cs.is_object());

    const Result ok = run({"circuit", "check", src.string(), "--public", "product=35,integrity=1", "--private",
                           "factor1=5,factor2=7"});
    CHECK(ok.code == 0);
    CHECK(ok.out == "satisfied\n");

    const Result bad = run({"circuit", "check", src.string(), "--public", "product=36,integrity=1", "--private",
                            "factor1=5,factor2=7"});
    CHECK(bad.code == cli::kExitFailure);
    CHECK(contains(bad.out, "unsatisfied"));

    const auto inputs =
        write_file(dir, "inputs.json", R"({"factor1": "5", "factor2": 7, "product": "35", "integrity": "3"})");
    const Result json = run({"circuit", "check", src.string(), "--inputs", inputs.string()});
    CHECK(json.code == 0);

    CHECK(run({"circuit", "check", src.string(), "--public", "product=35"}).code == cli::kExitFailure);

    const auto broken = write_file(dir, "broken.zk", "def main(public field x) -> bool {\n  assert(x == );\n}");
    const Result syn = run({"circuit", "compile", broken.string(), "--out", out});
    CHECK(syn.code == cli::kExitFailure);
    CHECK(contains(syn.err, "2"));
  }

  TEST_CASE("woo pipeline") {
    test::TempDir dir("cli-woo");
    const auto src = write_file(dir, "cubic.zk", kCubic);
    const std::string out = (dir / "out").string();
    auto at = [&](const std::string& name) { return (dir / "out" / name).string(); };

    // x = 3: y = 27 + 3 + 5 = 35.
    REQUIRE(run({"--out", out, "--seed", "4", "woo", "mask", src.string(), "--public", "y=35", "--private", "x=3"})
                .code == 0);
    const auto request = nlohmann::json::parse(slurp(at("request.json")));
    CHECK(request["masked_private"].contains("x"));

    const Result t = run({"--out", out, "--seed", "4", "woo", "transform", src.string(), "--masks", at("masks.json")});
    REQUIRE(t.code == 0);
    CHECK(contains(t.out, "(delta 3)"));

    REQUIRE(run({"--out", out, "woo", "prove", "--transformed", at("transformed.json"), "--keys", at("keys.json"),
                 "--request", at("request.json"), "--eta", "77"})
                .code == 0);

    const Result v = run({"woo", "verify", "--keys", at("keys.json"), "--proof", at("proof.json"), "--masks",
                          at("masks.json")});
    CHECK(v.code == 0);
    CHECK(contains(v.out, "ok\n"));
    CHECK(contains(v.out, "out_square = 9\n"));

    const Result wrong_eta =
        run({"woo", "verify", "--keys", at("keys.json"), "--proof", at("proof.json"), "--eta", "78"});
    CHECK(wrong_eta.code == cli::kExitFailure);
    CHECK(wrong_eta.out == "fail\n");

    // Tampered public input in the proof file.
    auto proof = nlohmann::json::parse(slurp(at("proof.json")));
    proof["public_inputs"][0] = "36";
    write_file(dir, "out/tampered.json", proof.dump());
    CHECK(run({"woo", "verify", "--keys", at("keys.json"), "--proof", at("tampered.json")}).code ==
          cli::kExitFailure);

    CHECK(run({"woo", "prove", "--transformed", at("transformed.json"), "--keys", at("keys.json"), "--request",
               at("request.json"), "--eta", "0", "--out", out})
              .code == cli::kExitFailure);

    const auto factor = write_file(dir, "factor.zk", test::kFactorSource);
    REQUIRE(run({"--out", (dir / "f").string(), "woo", "mask", factor.string(), "--public",
                 "product=35,integrity=1", "--private", "factor1=5,factor2=7"})
                .code == 0);
    CHECK(run({"--out", (dir / "f").string(), "woo", "transform", factor.string(), "--masks",
               (dir / "f/masks.json").string()})
              .code == cli::kExitFailure);
  }

  TEST_CASE("registry") {
    test::TempDir dir("cli-registry");
    const auto src = write_file(dir, "factor.zk", test::kFactorSource);
    const std::string out = (dir / "out").string();

    const Result r = run({"--out", out, "registry", "register", src.string(), "--fee", "30"});
    REQUIRE(r.code == 0);
    const std::string id = to_hex(circuit_id(test::kFactorSource));
    CHECK(contains(r.out, "circuit_id: " + id));
    CHECK(contains(r.out, "complexity: 2"));
    CHECK(contains(r.out, "balance=10"));

    const Result g = run({"--out", out, "registry", "get", id});
    CHECK(g.code == 0);
    CHECK(nlohmann::json::parse(g.out)["complexity"] == 2);
    CHECK(run({"--out", out, "registry", "get", std::string(64, '0')}).code == cli::kExitFailure);

    const auto base = write_file(dir, "base.zk", test::kFactorBaseSource);
    CHECK(run({"--out", out, "registry", "register", base.string(), "--fee", "30"}).code == cli::kExitFailure);
    const auto chain = write_file(dir, "chain.zk", synthetic_chain_source(5, 2, true));
    CHECK(run({"--out", out, "registry", "register", chain.string(), "--fee", "5"}).code == cli::kExitFailure);

    // The ledger carries state across invocations.
    std::size_t lines = 0;
    std::istringstream ledger(slurp(dir / "out/registry.jsonl"));
    for (std::string line; std::getline(ledger, line);) ++lines;
    CHECK(lines >= 7);  // three joins, one register, three fee credits
  }

  TEST_CASE("sim run writes CSV output") {
    test::TempDir dir("cli-sim");
    const std::string out = (dir / "out").string();
    const Result r = run({"--out", out, "--seed", "3", "sim", "run", "--blocks", "200", "--miners", "1,2", "--psi",
                          "1/2"});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "blocks=200"));
    const CsvTable metrics = read_csv(slurp(dir / "out/sim_metrics.csv"));
    CHECK(metrics.rows.size() == 3);  // two miners and the total
    const CsvTable summary = read_csv(slurp(dir / "out/sim_summary.csv"));
    REQUIRE(summary.rows.size() == 1);
    CHECK(summary.columns.front() == "seed");
    CHECK(summary.rows[0][0] == "3");
  }

  TEST_CASE("seed from the environment and the config file") {
    test::TempDir dir("cli-seed");
    const auto cfg = write_file(dir, "c.toml", "seed = 11\n[sim]\nmax_blocks = 50\n");
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "a").string(), "sim", "run"}).code == 0);
    CHECK(read_csv(slurp(dir / "a/sim_summary.csv")).rows[0][0] == "11");
    REQUIRE(run({"--config", cfg.string(), "--seed", "12", "--out", (dir / "b").string(), "sim", "run"}).code == 0);
    CHECK(read_csv(slurp(dir / "b/sim_summary.csv")).rows[0][0] == "12");
    const auto bad = write_file(dir, "bad.toml", "nonsense = 1\n");
    CHECK(run({"--config", bad.string(), "sim", "run"}).code == cli::kExitUsage);
  }

  TEST_CASE("repeated runs produce identical CSV bytes") {
    test::TempDir dir("cli-repeat");
    const std::string a = (dir / "a").string(), b = (dir / "b").string();
    for (const auto& o : {a, b}) {
      REQUIRE(run({"--out", o, "--seed", "5", "sim", "run", "--blocks", "300", "--miners", "1,3"}).code == 0);
      REQUIRE(run({"--out", o, "--seed", "5", "experiment", "overlap", "--m", "20,100", "--t", "2,5", "--trials",
                   "20000"})
                  .code == 0);
      REQUIRE(run({"--out", o, "--seed", "5", "experiment", "h2", "--seeds", "2", "--blocks", "200"}).code == 0);
    }
    for (const char* name : {"sim_metrics.csv", "sim_summary.csv", "overlap.csv", "h2.csv", "summary.csv"}) {
      CAPTURE(name);
      const std::string first = slurp(dir / ("a/" + std::string(name)));
      CHECK_FALSE(first.empty());
      CHECK(first == slurp(dir / ("b/" + std::string(name))));
    }
    const CsvTable summary = read_csv(slurp(dir / "a/summary.csv"));
    CHECK(summary.columns == std::vector<std::string>{"experiment", "setting", "metric", "value"});
    REQUIRE_FALSE(summary.rows.empty());
    CHECK(summary.rows.front()[0] == "h2");
    CHECK(summary.rows.back()[0] == "overlap");
  }
}
