#include "tricritic/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tricritic/envs/registry.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {
namespace {

using Json = nlohmann::json;

// Known keys per section; "" is the top level.
const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"",
       {"env", "reward_transform", "strategy", "agent", "network", "total_steps", "eval_every", "eval_episodes",
        "bias_probe_every", "bias_episodes", "probe_target_critics", "train_log_every", "seeds", "output_dir"}},
      {"reward_transform", {"scale", "noise_std", "sparsify_threshold"}},
      {"agent",
       {"gamma", "tau", "policy_delay", "exploration_noise_std", "target_noise_std", "target_noise_clip",
        "batch_size", "warmup_steps", "actor_lr", "critic_lr", "buffer_capacity"}},
      {"network", {"hidden_widths", "hidden_activation"}},
  };
  return s;
}

std::string join_path(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    throw ConfigLoadError(source_, node.Mark().line >= 0 ? node.Mark().line + 1 : 0, field, msg);
  }

  void check_keys(const YAML::Node& map, const std::string& section) const {
    if (!map.IsMap()) fail(map, section.empty() ? "<root>" : section, "expected a mapping");
    const auto& known = schema().at(section);
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (std::find(known.begin(), known.end(), key) != known.end()) continue;
      fail(kv.first, join_path(section, key), "unknown key" + suggestion(key, section));
    }
  }

  double real(const YAML::Node& n, const std::string& field) const {
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, field, "must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected a number");
    }
  }

  std::size_t count(const YAML::Node& n, const std::string& field, std::size_t min) const {
    long long v = 0;
    try {
      v = n.as<long long>();
    } catch (const YAML::BadConversion&) {
      // Accept integral reals such as 1e6.
      const double d = real(n, field);
      if (d != std::floor(d)) fail(n, field, "expected an integer");
      v = static_cast<long long>(d);
    }
    if (v < static_cast<long long>(min)) fail(n, field, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.as<std::string>();
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, "expected true or false");
    }
  }

 private:
  std::string suggestion(const std::string& key, const std::string& section) const {
    std::string best;
    std::size_t best_d = std::string::npos;
    bool best_same_section = false;
    for (const auto& [sec, keys] : schema()) {
      for (const auto& candidate : keys) {
        const std::size_t d = edit_distance(key, candidate);
        const bool same = sec == section;
        if (d < best_d || (d == best_d && same && !best_same_section)) {
          best_d = d;
          best = join_path(sec, candidate);
          best_same_section = same;
        }
      }
    }
    const std::size_t limit = std::max<std::size_t>(2, key.size() / 3);
    if (best_d <= limit) return " (did you mean '" + best + "'?)";
    return "";
  }

  std::string source_;
};

void range(const Reader& r, const YAML::Node& n, const std::string& field, bool ok, const std::string& msg) {
  if (!ok) r.fail(n, field, msg);
}

}  // namespace

ConfigLoadError::ConfigLoadError(const std::string& source, int line, const std::string& field,
                                 const std::string& message)
    : ConfigError(source + ":" + std::to_string(line) + ": " + field + ": " + message), field_(field), line_(line) {}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void ExperimentConfig::validate() const {
  try {
    make_env(env_id);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
  try {
    reward.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("reward_transform: ") + e.what());
  }
  try {
    agent.validate();
    network.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("agent: ") + e.what());
  }
  if (total_steps < 1) throw ConfigError("total_steps: must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every: must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes: must be >= 1");
  if (bias_probe_every < 1) throw ConfigError("bias_probe_every: must be >= 1");
  if (bias_episodes < 1) throw ConfigError("bias_episodes: must be >= 1");
  if (train_log_every < 1) throw ConfigError("train_log_every: must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds: seeds must be distinct");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigLoadError(source_name, e.mark.line + 1, "<syntax>", e.msg);
  }
  const Reader r(source_name);
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  r.check_keys(root, "");

  ExperimentConfig c;
  if (auto n = root["env"]) {
    c.env_id = r.text(n, "env");
    const auto ids = env_ids();
    range(r, n, "env", std::find(ids.begin(), ids.end(), c.env_id) != ids.end(),
          "unknown environment '" + c.env_id + "' (expected pendulum or reacher)");
  }
  if (auto n = root["strategy"]) {
    try {
      c.strategy = parse_rule(r.text(n, "strategy"));
    } catch (const ConfigError& e) {
      r.fail(n, "strategy", e.what());
    }
  }
  if (auto sec = root["reward_transform"]) {
    r.check_keys(sec, "reward_transform");
    if (auto n = sec["scale"]) {
      c.reward.scale = r.real(n, "reward_transform.scale");
      range(r, n, "reward_transform.scale", c.reward.scale != 0.0, "must be nonzero");
    }
    if (auto n = sec["noise_std"]) {
      c.reward.additive_noise_std = r.real(n, "reward_transform.noise_std");
      range(r, n, "reward_transform.noise_std", c.reward.additive_noise_std >= 0.0, "must be >= 0");
    }
    if (auto n = sec["sparsify_threshold"]; n && !n.IsNull())
      c.reward.sparsify_threshold = r.real(n, "reward_transform.sparsify_threshold");
  }
  if (auto sec = root["agent"]) {
    r.check_keys(sec, "agent");
    AgentConfig& a = c.agent;
    if (auto n = sec["gamma"]) {
      a.gamma = r.real(n, "agent.gamma");
      range(r, n, "agent.gamma", a.gamma >= 0.0 && a.gamma < 1.0, "must lie in [0, 1)");
    }
    if (auto n = sec["tau"]) {
      a.tau = r.real(n, "agent.tau");
      range(r, n, "agent.tau", a.tau > 0.0 && a.tau <= 1.0, "must lie in (0, 1]");
    }
    if (auto n = sec["policy_delay"]) a.policy_delay = r.count(n, "agent.policy_delay", 1);
    if (auto n = sec["exploration_noise_std"]; n && !n.IsNull()) {
      a.exploration_noise_std = r.real(n, "agent.exploration_noise_std");
      range(r, n, "agent.exploration_noise_std", *a.exploration_noise_std >= 0.0, "must be >= 0");
    }
    if (auto n = sec["target_noise_std"]) {
      a.target_noise_std = r.real(n, "agent.target_noise_std");
      range(r, n, "agent.target_noise_std", a.target_noise_std >= 0.0, "must be >= 0");
    }
    if (auto n = sec["target_noise_clip"]) {
      a.target_noise_clip = r.real(n, "agent.target_noise_clip");
      range(r, n, "agent.target_noise_clip", a.target_noise_clip >= 0.0, "must be >= 0");
    }
    if (auto n = sec["batch_size"]) a.batch_size = r.count(n, "agent.batch_size", 1);
    if (auto n = sec["warmup_steps"]) a.warmup_steps = r.count(n, "agent.warmup_steps", 0);
    if (auto n = sec["actor_lr"]) {
      a.actor_lr = r.real(n, "agent.actor_lr");
      range(r, n, "agent.actor_lr", a.actor_lr > 0.0, "must be positive");
    }
    if (auto n = sec["critic_lr"]) {
      a.critic_lr = r.real(n, "agent.critic_lr");
      range(r, n, "agent.critic_lr", a.critic_lr > 0.0, "must be positive");
    }
    if (auto n = sec["buffer_capacity"]) a.buffer_capacity = r.count(n, "agent.buffer_capacity", 1);
  }
  if (auto sec = root["network"]) {
    r.check_keys(sec, "network");
    if (auto n = sec["hidden_widths"]) {
      if (!n.IsSequence()) r.fail(n, "network.hidden_widths", "expected a list of widths");
      c.network.hidden_widths.clear();
      for (const auto& w : n) c.network.hidden_widths.push_back(r.count(w, "network.hidden_widths", 1));
    }
    if (auto n = sec["hidden_activation"]) {
      const std::string act = r.text(n, "network.hidden_activation");
      if (act == "relu")
        c.network.hidden_activation = HiddenActivation::ReLU;
      else if (act == "tanh")
        c.network.hidden_activation = HiddenActivation::Tanh;
      else
        r.fail(n, "network.hidden_activation", "expected relu or tanh");
    }
  }
  if (auto n = root["total_steps"]) c.total_steps = r.count(n, "total_steps", 1);
  if (auto n = root["eval_every"]) c.eval_every = r.count(n, "eval_every", 1);
  if (auto n = root["eval_episodes"]) c.eval_episodes = r.count(n, "eval_episodes", 1);
  if (auto n = root["bias_probe_every"]) c.bias_probe_every = r.count(n, "bias_probe_every", 1);
  if (auto n = root["bias_episodes"]) c.bias_episodes = r.count(n, "bias_episodes", 1);
  if (auto n = root["probe_target_critics"]) c.probe_target_critics = r.boolean(n, "probe_target_critics");
  if (auto n = root["train_log_every"]) c.train_log_every = r.count(n, "train_log_every", 1);
  if (auto n = root["output_dir"]) c.output_dir = r.text(n, "output_dir");
  if (auto n = root["seeds"]) {
    if (!n.IsSequence()) r.fail(n, "seeds", "expected a list of integers");
    std::set<std::uint64_t> seen;
    for (const auto& s : n) {
      const auto seed = static_cast<std::uint64_t>(r.count(s, "seeds", 0));
      if (!seen.insert(seed).second) r.fail(s, "seeds", "duplicate seed " + std::to_string(seed));
      c.seeds.push_back(seed);
    }
    if (c.seeds.empty()) r.fail(n, "seeds", "at least one seed is required");
  } else {
    throw ConfigLoadError(source_name, 0, "seeds", "missing required key");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string canonical_config_text(const ExperimentConfig& c) {
  Json j;
  j["env"] = c.env_id;
  j["strategy"] = std::string(rule_name(c.strategy));
  j["reward_transform"] = {{"scale", c.reward.scale},
                           {"noise_std", c.reward.additive_noise_std},
                           {"sparsify_threshold", c.reward.sparsify_threshold ? Json(*c.reward.sparsify_threshold)
                                                                               : Json(nullptr)}};
  const AgentConfig& a = c.agent;
  j["agent"] = {{"gamma", a.gamma},
                {"tau", a.tau},
                {"policy_delay", a.policy_delay},
                {"exploration_noise_std", a.exploration_noise_std ? Json(*a.exploration_noise_std) : Json(nullptr)},
                {"target_noise_std", a.target_noise_std},
                {"target_noise_clip", a.target_noise_clip},
                {"batch_size", a.batch_size},
                {"warmup_steps", a.warmup_steps},
                {"actor_lr", a.actor_lr},
                {"critic_lr", a.critic_lr},
                {"buffer_capacity", a.buffer_capacity}};
  j["network"] = {{"hidden_widths", c.network.hidden_widths},
                  {"hidden_activation", c.network.hidden_activation == HiddenActivation::ReLU ? "relu" : "tanh"}};
  j["total_steps"] = c.total_steps;
  j["eval_every"] = c.eval_every;
  j["eval_episodes"] = c.eval_episodes;
  j["bias_probe_every"] = c.bias_probe_every;
  j["bias_episodes"] = c.bias_episodes;
  j["probe_target_critics"] = c.probe_target_critics;
  j["train_log_every"] = c.train_log_every;
  j["seeds"] = c.seeds;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_config_text(config))));
  return buf;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  std::filesystem::path dir = config.output_dir.empty()
                                  ? std::filesystem::path("runs") / (config.env_id + "_" + std::string(rule_name(config.strategy)))
                                  : std::filesystem::path(config.output_dir);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv("TRICRITIC_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / dir;
  return dir;
}

}  // namespace tricritic
