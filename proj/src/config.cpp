#include "pouw/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <tomlplusplus/toml.hpp>

#include "pouw/error.hpp"
#include "pouw/protocol.hpp"

namespace pouw {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) bad(what + ": expected an unsigned integer");
  return v;
}

/// Typed reads from one TOML table; finish() rejects keys nobody asked for.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string path) : t_(table), path_(std::move(path)) {}

  std::string name(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  const toml::node* get(std::string_view key) {
    seen_.insert(std::string(key));
    return t_.get(key);
  }

  std::optional<std::uint64_t> u64(std::string_view key) {
    const auto* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::int64_t>()) {
      if (*v < 0) bad(name(key) + " must be non-negative");
      return static_cast<std::uint64_t>(*v);
    }
    if (auto s = n->value_exact<std::string>()) return parse_u64(*s, name(key));
    bad(name(key) + " must be an integer");
  }

  std::optional<double> real(std::string_view key) {
    const auto* n = get(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
    bad(name(key) + " must be a number");
  }

  std::optional<Rational> rational(std::string_view key) {
    const auto* n = get(key);
    if (!n) return std::nullopt;
    try {
      if (auto s = n->value_exact<std::string>()) return parse_rational(*s);
      if (auto v = n->value_exact<std::int64_t>()) {
        if (*v < 0) bad(name(key) + " must be non-negative");
        return Rational(*v);
      }
      if (auto v = n->value_exact<double>()) {
        // Shortest fixed-point form, so 0.1 reads as 1/10.
        char buf[400];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *v, std::chars_format::fixed);
        if (ec != std::errc{}) bad(name(key) + " is out of range");
        return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
      }
    } catch (const Error& e) {
      bad(name(key) + ": " + e.what());
    }
    bad(name(key) + " must be a number or a \"p/q\" string");
  }

  std::optional<std::string> text(std::string_view key) {
    const auto* n = get(key);
    if (!n) return std::nullopt;
    if (auto s = n->value_exact<std::string>()) return *s;
    bad(name(key) + " must be a string");
  }

  std::optional<bool> flag(std::string_view key) {
    const auto* n = get(key);
    if (!n) return std::nullopt;
    if (auto b = n->value_exact<bool>()) return *b;
    bad(name(key) + " must be true or false");
  }

  const toml::table* table(std::string_view key) {
    const auto* n = get(key);
    if (!n) return nullptr;
    if (const auto* t = n->as_table()) return t;
    bad(name(key) + " must be a table");
  }

  const toml::array* array(std::string_view key) {
    const auto* n = get(key);
    if (!n) return nullptr;
    if (const auto* a = n->as_array()) return a;
    bad(name(key) + " must be an array of tables");
  }

  void finish() const {
    for (const auto& [k, v] : t_) {
      if (!seen_.contains(std::string(k.str()))) bad("unknown key '" + name(k.str()) + "'");
    }
  }

 private:
  const toml::table& t_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T, class U>
void assign(T& target, const std::optional<U>& v) {
  if (v) target = static_cast<T>(*v);
}

std::pair<std::string_view, std::optional<std::uint64_t>> split_param(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return {text, std::nullopt};
  return {text.substr(0, colon), parse_u64(text.substr(colon + 1), std::string(text))};
}

void read_sim(TableReader& r, AppConfig& cfg, bool& fee_rate_set) {
  auto& s = cfg.sim;
  assign(s.kappa0, r.u64("kappa0"));
  if (auto psi = r.rational("psi")) s.psi = *psi;
  if (const auto* n = r.get("k_bits")) {
    if (auto str = n->value_exact<std::string>(); str && *str == "auto") {
      s.k_auto = true;
    } else if (auto v = n->value_exact<std::int64_t>(); v && *v >= 0) {
      s.k_auto = false;
      s.k_bits = static_cast<unsigned>(std::min<std::int64_t>(*v, 1000));
    } else {
      bad("sim.k_bits must be a non-negative integer or \"auto\"");
    }
  }
  assign(s.target_per_bucket, r.u64("target_per_bucket"));
  assign(s.proof_time_a, r.real("proof_time_a"));
  assign(s.proof_time_b, r.real("proof_time_b"));
  assign(s.block_reward, r.u64("block_reward"));
  if (auto v = r.u64("proof_fee_rate")) {
    s.proof_fee_rate = *v;
    fee_rate_set = true;
  }
  assign(s.retarget_window, r.u64("retarget_window"));
  assign(s.target_block_time, r.real("target_block_time"));
  assign(s.max_blocks, r.u64("max_blocks"));
  assign(s.max_time, r.real("max_time"));
  assign(s.real_work, r.flag("real_work"));

  if (const auto* mt = r.table("mempool")) {
    TableReader m(*mt, r.name("mempool"));
    if (auto model = m.text("model")) {
      if (*model == "infinite") s.mempool.kind = sim::MempoolKind::infinite;
      else if (*model == "poisson") s.mempool.kind = sim::MempoolKind::poisson;
      else bad("sim.mempool.model must be \"infinite\" or \"poisson\"");
    }
    assign(s.mempool.arrival_rate, m.real("arrival_rate"));
    assign(s.mempool.initial_pending, m.u64("initial_pending"));
    assign(s.mempool.c_min, m.u64("c_min"));
    assign(s.mempool.c_max, m.u64("c_max"));
    m.finish();
  }

  if (const auto* miners = r.array("miners")) {
    s.miners.clear();
    std::uint32_t next_id = 0;
    for (const auto& node : *miners) {
      const auto* mt = node.as_table();
      if (!mt) bad("sim.miners entries must be tables");
      TableReader m(*mt, "sim.miners");
      sim::MinerSpec spec;
      spec.miner_id = static_cast<std::uint32_t>(m.u64("id").value_or(next_id));
      next_id = spec.miner_id + 1;
      assign(spec.power, m.real("power"));
      try {
        if (auto p = m.text("preference")) spec.preference = parse_preference(*p);
        if (auto b = m.text("bucket_strategy")) spec.bucket_strategy = parse_bucket_strategy(*b);
      } catch (const Error& e) {
        bad(e.what());
      }
      m.finish();
      s.miners.push_back(spec);
    }
  }

  if (const auto* sched = r.array("power_schedule")) {
    for (const auto& node : *sched) {
      const auto* pt = node.as_table();
      if (!pt) bad("sim.power_schedule entries must be tables");
      TableReader p(*pt, "sim.power_schedule");
      sim::PowerChange pc;
      assign(pc.time, p.real("time"));
      auto miner = p.u64("miner");
      if (!miner) bad("sim.power_schedule entries need a miner");
      pc.miner_id = static_cast<std::uint32_t>(*miner);
      auto power = p.real("power");
      if (!power) bad("sim.power_schedule entries need a power");
      pc.power = *power;
      p.finish();
      s.power_schedule.push_back(pc);
    }
  }
  r.finish();
}

}  // namespace

sim::ProofSizePreference parse_preference(std::string_view text) {
  auto [kind, n] = split_param(text);
  if (kind == "uniform_random" && !n) return {sim::PreferenceKind::uniform_random, 0};
  if (kind == "prefer_small" && !n) return {sim::PreferenceKind::prefer_small, 0};
  if (kind == "prefer_large" && !n) return {sim::PreferenceKind::prefer_large, 0};
  if (kind == "fixed" && n && *n > 0) return {sim::PreferenceKind::fixed, *n};
  throw Error(Errc::ConfigInvalid, "bad proof size preference '" + std::string(text) + "'");
}

sim::BucketStrategy parse_bucket_strategy(std::string_view text) {
  auto [kind, n] = split_param(text);
  if (kind == "random" && !n) return {sim::BucketStrategyKind::random, 0};
  if (kind == "least_loaded" && !n) return {sim::BucketStrategyKind::least_loaded, 0};
  if (kind == "fixed" && n && *n <= 0xffffffffULL) {
    return {sim::BucketStrategyKind::fixed, static_cast<std::uint32_t>(*n)};
  }
  throw Error(Errc::ConfigInvalid, "bad bucket strategy '" + std::string(text) + "'");
}

AppConfig default_app_config() {
  AppConfig c;
  c.sim.miners = sim::make_miners({1.0, 1.0});
  return c;
}

void validate(const AppConfig& c) {
  if (c.field_modulus <= (1u << 16) || !is_prime_u64(c.field_modulus)) {
    bad("field.modulus must be a prime above 2^16");
  }
  if (c.registry.slash_denominator == 0 || c.registry.slash_numerator > c.registry.slash_denominator) {
    bad("registry.slash_fraction must lie in [0, 1]");
  }
  sim::validate(c.sim);
}

AppConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML syntax error at line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
       << e.description();
    bad(os.str());
  }

  AppConfig cfg = default_app_config();
  bool fee_rate_set = false;
  TableReader r(root, "");
  cfg.seed = r.u64("seed");
  if (auto out = r.text("out")) cfg.out_dir = *out;

  if (const auto* ft = r.table("field")) {
    TableReader f(*ft, "field");
    assign(cfg.field_modulus, f.u64("modulus"));
    f.finish();
  }
  if (const auto* rt = r.table("registry")) {
    TableReader g(*rt, "registry");
    assign(cfg.registry.min_stake, g.u64("min_stake"));
    if (auto frac = g.rational("slash_fraction")) {
      const BigInt num = boost::multiprecision::numerator(*frac);
      const BigInt den = boost::multiprecision::denominator(*frac);
      if (den > std::numeric_limits<std::uint64_t>::max()) bad("registry.slash_fraction is too fine-grained");
      cfg.registry.slash_numerator = static_cast<std::uint64_t>(num);
      cfg.registry.slash_denominator = static_cast<std::uint64_t>(den);
    }
    assign(cfg.registry.min_registration_fee, g.u64("min_registration_fee"));
    assign(cfg.fee_rate, g.u64("fee_rate"));
    g.finish();
  }
  if (const auto* st = r.table("sim")) {
    TableReader s(*st, "sim");
    read_sim(s, cfg, fee_rate_set);
  }
  r.finish();

  if (!fee_rate_set) cfg.sim.proof_fee_rate = cfg.fee_rate;
  cfg.sim.field_modulus = cfg.field_modulus;
  if (cfg.seed) cfg.sim.seed = *cfg.seed;
  validate(cfg);
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pouw
