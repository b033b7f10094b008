#include "phe/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "phe/errors.hpp"

namespace phe {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  YAML::Node load(std::string_view text) const {
    try {
      YAML::Node root = YAML::Load(std::string(text));
      if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
      if (!root.IsMap()) fail(root, "top level must be a mapping");
      return root;
    } catch (const YAML::ParserException& e) {
      throw ConfigError(fmt::format("{}:{}: {}", source_, e.mark.line + 1, e.msg));
    }
  }

  [[noreturn]] void fail(const YAML::Node& node, std::string_view message) const {
    const int line = node.Mark().is_null() ? 0 : node.Mark().line + 1;
    throw ConfigError(fmt::format("{}:{}: {}", source_, line, message));
  }

  void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) fail(map, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, fmt::format("unknown key '{}'", key));
      }
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar()) fail(node, fmt::format("'{}' must be a scalar", what));
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, fmt::format("'{}' has an invalid value '{}'", what, node.Scalar()));
    }
  }

  /// Overwrites `out` when `key` is present.
  template <class T>
  void optional(const YAML::Node& map, const char* key, T& out) const {
    if (const YAML::Node node = map[key]) out = scalar<T>(node, key);
  }

  std::size_t count(const YAML::Node& map, const char* key, std::size_t fallback) const {
    const YAML::Node node = map[key];
    if (!node) return fallback;
    const auto value = scalar<std::int64_t>(node, key);
    if (value < 0) fail(node, fmt::format("'{}' must be nonnegative", key));
    return static_cast<std::size_t>(value);
  }

  template <class T>
  void list(const YAML::Node& map, const char* key, std::vector<T>& out) const {
    const YAML::Node node = map[key];
    if (!node) return;
    if (!node.IsSequence()) fail(node, fmt::format("'{}' must be a list", key));
    out.clear();
    for (const auto& item : node) out.push_back(scalar<T>(item, key));
  }

  RewardFamily family(const YAML::Node& node) const {
    only_keys(node, {"family", "v", "low", "high"});
    const YAML::Node kind = node["family"];
    if (!kind) fail(node, "environment needs a 'family'");
    const auto name = scalar<std::string>(kind, "family");
    if (name == "bernoulli") {
      if (node["v"] || node["low"] || node["high"]) fail(node, "bernoulli takes no parameters");
      return BernoulliFamily{};
    }
    if (name == "beta") {
      if (node["low"] || node["high"]) fail(node, "beta takes only 'v'");
      BetaFamily beta;
      optional(node, "v", beta.v);
      return beta;
    }
    if (name == "rescaled") {
      if (node["v"]) fail(node, "rescaled takes 'low' and 'high'");
      RescaledFamily rescaled;
      optional(node, "low", rescaled.low);
      optional(node, "high", rescaled.high);
      return rescaled;
    }
    fail(kind, fmt::format("unknown family '{}' (bernoulli, beta, rescaled)", name));
  }

  LabeledPolicy policy(const YAML::Node& node) const {
    if (!node.IsMap()) fail(node, "each policy must be a mapping");
    const YAML::Node type_node = node["type"];
    if (!type_node) fail(node, "policy needs a 'type'");
    const auto type = scalar<std::string>(type_node, "type");
    PolicySpec spec;
    if (type == "phe") {
      only_keys(node, {"label", "type", "a"});
      PheSpec s;
      optional(node, "a", s.a);
      spec = s;
    } else if (type == "ucb1") {
      only_keys(node, {"label", "type"});
      spec = Ucb1Spec{};
    } else if (type == "klucb") {
      only_keys(node, {"label", "type", "bisect_tol", "max_iter"});
      KlUcbSpec s;
      optional(node, "bisect_tol", s.bisect_tol);
      optional(node, "max_iter", s.max_iter);
      spec = s;
    } else if (type == "ts") {
      only_keys(node, {"label", "type"});
      spec = ThompsonSpec{};
    } else if (type == "giro") {
      only_keys(node, {"label", "type", "a", "exact_multinomial"});
      GiroSpec s;
      optional(node, "a", s.a);
      optional(node, "exact_multinomial", s.exact_multinomial);
      spec = s;
    } else if (type == "fpl") {
      only_keys(node, {"label", "type", "learning_rate_scale", "resample_cap"});
      FplSpec s;
      optional(node, "learning_rate_scale", s.learning_rate_scale);
      if (const YAML::Node cap = node["resample_cap"]) s.resample_cap = scalar<std::int64_t>(cap, "resample_cap");
      spec = s;
    } else {
      fail(type_node, fmt::format("unknown policy type '{}' (phe, ucb1, klucb, ts, giro, fpl)", type));
    }
    try {
      validate(spec);
    } catch (const UsageError& e) {
      fail(node, e.what());
    }
    std::string label = default_label(spec);
    optional(node, "label", label);
    if (label.empty()) fail(node, "policy label must not be empty");
    return {std::move(label), std::move(spec)};
  }

  std::vector<LabeledPolicy> policies(const YAML::Node& map) const {
    const YAML::Node node = map["policies"];
    if (!node) fail(map, "missing 'policies'");
    if (!node.IsSequence()) fail(node, "'policies' must be a list");
    if (node.size() == 0) fail(node, "'policies' is empty; nothing to run");
    std::vector<LabeledPolicy> out;
    std::set<std::string> seen;
    for (const auto& item : node) {
      out.push_back(policy(item));
      if (!seen.insert(out.back().label).second) fail(item, fmt::format("duplicate label '{}'", out.back().label));
    }
    return out;
  }

  void means(const YAML::Node& map, double& low, double& high) const {
    const YAML::Node node = map["means"];
    if (!node) return;
    if (!node.IsSequence() || node.size() != 2) fail(node, "'means' must be a [low, high] pair");
    low = scalar<double>(node[0], "means");
    high = scalar<double>(node[1], "means");
  }

 private:
  std::string source_;
};

/// Shortest round-trip decimal form.
std::string num(double x) { return fmt::format("{}", x); }

void emit_family(YAML::Emitter& out, const RewardFamily& family) {
  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  std::visit(Overloaded{
                 [&](const BernoulliFamily&) { out << YAML::Key << "family" << YAML::Value << "bernoulli"; },
                 [&](const BetaFamily& f) {
                   out << YAML::Key << "family" << YAML::Value << "beta";
                   out << YAML::Key << "v" << YAML::Value << num(f.v);
                 },
                 [&](const RescaledFamily& f) {
                   out << YAML::Key << "family" << YAML::Value << "rescaled";
                   out << YAML::Key << "low" << YAML::Value << num(f.low);
                   out << YAML::Key << "high" << YAML::Value << num(f.high);
                 },
             },
             family);
  out << YAML::EndMap;
}

void emit_means(YAML::Emitter& out, double low, double high) {
  out << YAML::Key << "means" << YAML::Value << YAML::Flow << YAML::BeginSeq << num(low) << num(high)
      << YAML::EndSeq;
}

void emit_policies(YAML::Emitter& out, const std::vector<LabeledPolicy>& policies) {
  out << YAML::Key << "policies" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : policies) {
    out << YAML::BeginMap;
    out << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << p.label;
    out << YAML::Key << "type" << YAML::Value << std::string(policy_kind(p.spec));
    std::visit(Overloaded{
                   [&](const PheSpec& s) { out << YAML::Key << "a" << YAML::Value << num(s.a); },
                   [&](const Ucb1Spec&) {},
                   [&](const KlUcbSpec& s) {
                     out << YAML::Key << "bisect_tol" << YAML::Value << num(s.bisect_tol);
                     out << YAML::Key << "max_iter" << YAML::Value << s.max_iter;
                   },
                   [&](const ThompsonSpec&) {},
                   [&](const GiroSpec& s) {
                     out << YAML::Key << "a" << YAML::Value << num(s.a);
                     out << YAML::Key << "exact_multinomial" << YAML::Value << s.exact_multinomial;
                   },
                   [&](const FplSpec& s) {
                     out << YAML::Key << "learning_rate_scale" << YAML::Value << num(s.learning_rate_scale);
                     if (s.resample_cap) out << YAML::Key << "resample_cap" << YAML::Value << *s.resample_cap;
                   },
               },
               p.spec);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

template <class T>
void emit_list(YAML::Emitter& out, const char* key, const std::vector<T>& values) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const T& v : values) {
    if constexpr (std::is_floating_point_v<T>) {
      out << num(v);
    } else {
      out << v;
    }
  }
  out << YAML::EndSeq;
}

std::string finish(const YAML::Emitter& out) { return std::string(out.c_str()) + "\n"; }

}  // namespace

// -- Experiment -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("'policies' is empty; nothing to run");
  std::set<std::string> seen;
  for (const auto& p : policies) {
    if (!seen.insert(p.label).second) throw ConfigError(fmt::format("duplicate label '{}'", p.label));
    try {
      phe::validate(p.spec);
    } catch (const UsageError& e) {
      throw ConfigError(fmt::format("policy '{}': {}", p.label, e.what()));
    }
  }
  problems.validate();
  if (horizon < 1) throw ConfigError(fmt::format("horizon must be positive, got {}", horizon));
  if (num_problems < 1) throw ConfigError("num_problems must be positive");
}

ExperimentPlan ExperimentConfig::plan() const {
  validate();
  return {problems, policies, horizon, num_problems, master_seed, std::max<std::size_t>(1, workers)};
}

ExperimentConfig default_experiment_config(RewardFamily family) {
  ExperimentConfig config;
  config.name = std::holds_alternative<BetaFamily>(family) ? "beta" : "bernoulli";
  config.problems = {10, 0.25, 0.75, family};
  config.horizon = 10'000;
  config.num_problems = 100;
  config.master_seed = 20'190'101;
  const std::vector<PolicySpec> specs = {Ucb1Spec{},       KlUcbSpec{},      ThompsonSpec{},  GiroSpec{1.0},
                                         FplSpec{},        PheSpec{0.5},     PheSpec{1.1},    PheSpec{2.1}};
  for (const auto& spec : specs) config.policies.push_back({default_label(spec), spec});
  return config;
}

ExperimentConfig parse_experiment_config(std::string_view text, std::string_view source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  r.only_keys(root, {"name", "environment", "arms", "horizon", "num_problems", "master_seed", "workers", "means",
                     "policies"});
  ExperimentConfig config;
  r.optional(root, "name", config.name);
  if (const YAML::Node env = root["environment"]) config.problems.family = r.family(env);
  config.problems.num_arms = r.count(root, "arms", config.problems.num_arms);
  r.optional(root, "horizon", config.horizon);
  config.num_problems = r.count(root, "num_problems", config.num_problems);
  r.optional(root, "master_seed", config.master_seed);
  config.workers = r.count(root, "workers", config.workers);
  r.means(root, config.problems.mean_low, config.problems.mean_high);
  config.policies = r.policies(root);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    r.fail(root, e.what());
  }
  return config;
}

std::string to_yaml(const ExperimentConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << config.name;
  emit_family(out, config.problems.family);
  out << YAML::Key << "arms" << YAML::Value << config.problems.num_arms;
  out << YAML::Key << "horizon" << YAML::Value << config.horizon;
  out << YAML::Key << "num_problems" << YAML::Value << config.num_problems;
  out << YAML::Key << "master_seed" << YAML::Value << config.master_seed;
  out << YAML::Key << "workers" << YAML::Value << config.workers;
  emit_means(out, config.problems.mean_low, config.problems.mean_high);
  emit_policies(out, config.policies);
  out << YAML::EndMap;
  return finish(out);
}

// -- Verify ---------------------------------------------------------------------

VerifyConfig parse_verify_config(std::string_view text, std::string_view source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  r.only_keys(root, {"workers", "mu", "theorem4", "lemma3", "lemma2", "hoeffding", "constant_c", "optimism"});
  VerifyConfig config;
  VerifyGrid& g = config.grid;
  config.workers = r.count(root, "workers", config.workers);
  r.list(root, "mu", g.mu_values);
  if (const YAML::Node n = root["theorem4"]) {
    r.only_keys(n, {"a", "n_max"});
    r.list(n, "a", g.theorem4_a);
    r.optional(n, "n_max", g.theorem4_n_max);
    for (const double a : g.theorem4_a) {
      if (!(a > 1.0)) r.fail(n, fmt::format("theorem4 needs a > 1, got {}", a));
    }
    if (g.theorem4_n_max > kEnumerationBudget) {
      r.fail(n, fmt::format("n_max above the enumeration budget {}", kEnumerationBudget));
    }
  }
  if (const YAML::Node n = root["lemma3"]) {
    r.only_keys(n, {"a", "n_max", "deltas"});
    r.list(n, "a", g.lemma3_a);
    r.optional(n, "n_max", g.lemma3_n_max);
    g.lemma3_deltas = r.count(n, "deltas", g.lemma3_deltas);
  }
  if (const YAML::Node n = root["lemma2"]) {
    r.only_keys(n, {"a", "n_max"});
    r.list(n, "a", g.lemma2_a);
    r.optional(n, "n_max", g.lemma2_n_max);
  }
  if (const YAML::Node n = root["hoeffding"]) {
    r.only_keys(n, {"s_max", "mu", "eps"});
    r.optional(n, "s_max", g.hoeffding_s_max);
    r.list(n, "mu", g.hoeffding_mu);
    r.list(n, "eps", g.hoeffding_eps);
  }
  if (const YAML::Node n = root["constant_c"]) {
    r.only_keys(n, {"a"});
    r.list(n, "a", g.constant_c_a);
  }
  if (const YAML::Node n = root["optimism"]) {
    r.only_keys(n, {"a", "s_min", "s_max", "mu"});
    r.list(n, "a", g.optimism_a);
    r.optional(n, "s_min", g.optimism_s_min);
    r.optional(n, "s_max", g.optimism_s_max);
    r.list(n, "mu", g.optimism_mu);
  }
  return config;
}

std::string to_yaml(const VerifyConfig& config) {
  const VerifyGrid& g = config.grid;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "workers" << YAML::Value << config.workers;
  emit_list(out, "mu", g.mu_values);
  out << YAML::Key << "theorem4" << YAML::Value << YAML::BeginMap;
  emit_list(out, "a", g.theorem4_a);
  out << YAML::Key << "n_max" << YAML::Value << g.theorem4_n_max << YAML::EndMap;
  out << YAML::Key << "lemma3" << YAML::Value << YAML::BeginMap;
  emit_list(out, "a", g.lemma3_a);
  out << YAML::Key << "n_max" << YAML::Value << g.lemma3_n_max;
  out << YAML::Key << "deltas" << YAML::Value << g.lemma3_deltas << YAML::EndMap;
  out << YAML::Key << "lemma2" << YAML::Value << YAML::BeginMap;
  emit_list(out, "a", g.lemma2_a);
  out << YAML::Key << "n_max" << YAML::Value << g.lemma2_n_max << YAML::EndMap;
  out << YAML::Key << "hoeffding" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "s_max" << YAML::Value << g.hoeffding_s_max;
  emit_list(out, "mu", g.hoeffding_mu);
  emit_list(out, "eps", g.hoeffding_eps);
  out << YAML::EndMap;
  out << YAML::Key << "constant_c" << YAML::Value << YAML::BeginMap;
  emit_list(out, "a", g.constant_c_a);
  out << YAML::EndMap;
  out << YAML::Key << "optimism" << YAML::Value << YAML::BeginMap;
  emit_list(out, "a", g.optimism_a);
  out << YAML::Key << "s_min" << YAML::Value << g.optimism_s_min;
  out << YAML::Key << "s_max" << YAML::Value << g.optimism_s_max;
  emit_list(out, "mu", g.optimism_mu);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return finish(out);
}

// -- Bench ----------------------------------------------------------------------

BenchConfig default_bench_config() {
  BenchConfig config;
  for (const PolicySpec& spec : {PolicySpec{ThompsonSpec{}}, PolicySpec{PheSpec{1.1}}, PolicySpec{GiroSpec{1.0}}}) {
    config.plan.policies.push_back({default_label(spec), spec});
  }
  return config;
}

BenchConfig parse_bench_config(std::string_view text, std::string_view source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  r.only_keys(root, {"environment", "arms", "horizons", "repeats", "master_seed", "means", "policies"});
  BenchConfig config = default_bench_config();
  TimingPlan& plan = config.plan;
  if (const YAML::Node env = root["environment"]) plan.family = r.family(env);
  r.list(root, "arms", plan.arm_counts);
  r.list(root, "horizons", plan.horizons);
  r.optional(root, "repeats", plan.repeats);
  r.optional(root, "master_seed", plan.master_seed);
  r.means(root, plan.mean_low, plan.mean_high);
  if (root["policies"]) plan.policies = r.policies(root);
  if (plan.repeats < 1) r.fail(root["repeats"], "repeats must be positive");
  for (const auto k : plan.arm_counts) {
    if (k < 1) r.fail(root["arms"], "arm counts must be positive");
  }
  for (const auto n : plan.horizons) {
    if (n < 10) r.fail(root["horizons"], "horizons must be at least 10 for decile timing");
  }
  try {
    ProblemGenSpec{1, plan.mean_low, plan.mean_high, plan.family}.validate();
  } catch (const ConfigError& e) {
    r.fail(root, e.what());
  }
  return config;
}

std::string to_yaml(const BenchConfig& config) {
  const TimingPlan& plan = config.plan;
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_family(out, plan.family);
  emit_list(out, "arms", plan.arm_counts);
  emit_list(out, "horizons", plan.horizons);
  out << YAML::Key << "repeats" << YAML::Value << plan.repeats;
  out << YAML::Key << "master_seed" << YAML::Value << plan.master_seed;
  emit_means(out, plan.mean_low, plan.mean_high);
  emit_policies(out, plan.policies);
  out << YAML::EndMap;
  return finish(out);
}

// -- Misc -----------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace phe
