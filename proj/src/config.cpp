#include "maxentdp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <variant>
#include <yaml-cpp/yaml.h>

namespace maxentdp {

namespace {

struct Value {
  enum class Kind { string, boolean, integer, real, array } kind = Kind::string;
  std::string text;
  bool flag = false;
  long long integer = 0;
  double real = 0;
  std::vector<Value> items;
};

using Target = std::variant<int*, std::int64_t*, std::uint64_t*, double*, bool*, std::string*, std::optional<int>*,
                            std::vector<double>*, std::vector<int>*, std::vector<std::string>*>;

struct Field {
  std::string key;
  Target target;
};

std::vector<Field> fields(RunConfig& c) {
  return {
      {"seed", &c.seed},
      {"out", &c.out},
      {"schedule.beta_min", &c.schedule.beta_min},
      {"schedule.beta_max", &c.schedule.beta_max},
      {"schedule.t_min", &c.schedule.t_min},
      {"schedule.t_max", &c.schedule.t_max},
      {"schedule.diffusion_steps", &c.schedule.diffusion_steps},
      {"net.hidden_layers", &c.net.hidden_layers},
      {"net.hidden_units", &c.net.hidden_units},
      {"net.actor_lr", &c.net.actor_lr},
      {"net.critic_lr", &c.net.critic_lr},
      {"net.adam_beta1", &c.net.adam_beta1},
      {"net.adam_beta2", &c.net.adam_beta2},
      {"net.adam_eps", &c.net.adam_eps},
      {"sac.gamma", &c.sac.gamma},
      {"sac.tau", &c.sac.tau},
      {"sac.beta", &c.sac.beta},
      {"sac.batch_size", &c.sac.batch_size},
      {"sac.qne_samples", &c.sac.qne_samples},
      {"sac.buffer_capacity", &c.sac.buffer_capacity},
      {"sac.total_steps", &c.sac.total_steps},
      {"sac.warmup_steps", &c.sac.warmup_steps},
      {"sac.updates_per_step", &c.sac.updates_per_step},
      {"sac.entropy_in_target", &c.sac.entropy_in_target},
      {"sac.log_interval", &c.sac.log_interval},
      {"sac.checkpoint_interval", &c.sac.checkpoint_interval},
      {"sac.parallel", &c.sac.parallel},
      {"sac.stop_at_coverage", &c.sac.stop_at_coverage},
      {"sampler.method", &c.sampler.method},
      {"sampler.steps", &c.sampler.steps},
      {"sampler.clip_final", &c.sampler.clip_final},
      {"env.name", &c.env.name},
      {"env.goal_distance", &c.env.goal_distance},
      {"env.velocity_penalty", &c.env.velocity_penalty},
      {"env.capture_radius", &c.env.capture_radius},
      {"env.horizon", &c.env.horizon},
      {"env.arena_half_width", &c.env.arena_half_width},
      {"env.reset_std", &c.env.reset_std},
      {"env.mixture_offset", &c.env.mixture_offset},
      {"env.mixture_std", &c.env.mixture_std},
      {"env.action_low", &c.env.action_low},
      {"env.action_high", &c.env.action_high},
      {"likelihood.steps", &c.likelihood.steps},
      {"likelihood.samples", &c.likelihood.samples},
      {"likelihood.model", &c.likelihood.model},
      {"likelihood.checkpoint", &c.likelihood.checkpoint},
      {"likelihood.grid", &c.likelihood.grid},
      {"likelihood.box_low", &c.likelihood.box_low},
      {"likelihood.box_high", &c.likelihood.box_high},
      {"eval.action_candidates", &c.eval.action_candidates},
      {"eval.interval", &c.eval.interval},
      {"eval.episodes", &c.eval.episodes},
      {"bench.estimators", &c.bench.estimators},
      {"bench.times", &c.bench.times},
      {"bench.samples", &c.bench.samples},
      {"bench.beta", &c.bench.beta},
      {"bench.repeats", &c.bench.repeats},
      {"bench.points", &c.bench.points},
      {"bench.q", &c.bench.q},
      {"bench.curvature", &c.bench.curvature},
      {"bench.jitter", &c.bench.jitter},
  };
}

// ---- parsing ---------------------------------------------------------------

const YAML::Node& scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, "expected a single value");
  return n;
}

template <class T>
T convert(const YAML::Node& n, const std::string& key, const char* what) {
  try {
    return scalar(n, key).as<T>();
  } catch (const YAML::BadConversion&) {
    throw ConfigError(key, std::string("expected ") + what + ", got '" + n.Scalar() + "'");
  }
}

int as_int(const YAML::Node& n, const std::string& key) { return convert<int>(n, key, "an integer"); }

const YAML::Node& sequence(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError(key, "expected a list");
  return n;
}

void assign(const Field& f, const YAML::Node& n) {
  const std::string& key = f.key;
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, int>) {
          *p = as_int(n, key);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          *p = convert<std::int64_t>(n, key, "an integer");
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (scalar(n, key).Scalar().starts_with('-')) throw ConfigError(key, "must be non-negative");
          *p = convert<std::uint64_t>(n, key, "a non-negative integer");
        } else if constexpr (std::is_same_v<T, double>) {
          *p = convert<double>(n, key, "a number");
        } else if constexpr (std::is_same_v<T, bool>) {
          *p = convert<bool>(n, key, "true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = scalar(n, key).Scalar();
        } else if constexpr (std::is_same_v<T, std::optional<int>>) {
          *p = as_int(n, key);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          p->clear();
          for (const auto& item : sequence(n, key)) p->push_back(convert<double>(item, key, "a number"));
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          p->clear();
          for (const auto& item : sequence(n, key)) p->push_back(as_int(item, key));
        } else {
          p->clear();
          for (const auto& item : sequence(n, key)) p->push_back(scalar(item, key).Scalar());
        }
      },
      f.target);
}

// ---- serialization ---------------------------------------------------------

// Shortest text that reads back to the same double.
std::string format_real(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, p);
  if (s == "inf") return ".inf";
  if (s == "-inf") return "-.inf";
  if (s == "nan" || s == "-nan") return ".nan";
  return s;
}

void emit(YAML::Emitter& out, const Target& target) {
  std::visit(
      [&out](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          out << format_real(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          out << (*p ? "true" : "false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          out << YAML::DoubleQuoted << *p;
        } else if constexpr (std::is_same_v<T, std::optional<int>>) {
          out << **p;
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          out << YAML::Flow << YAML::BeginSeq;
          for (double d : *p) out << format_real(d);
          out << YAML::EndSeq;
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          out << YAML::Flow << YAML::BeginSeq;
          for (int i : *p) out << i;
          out << YAML::EndSeq;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          out << YAML::Flow << YAML::BeginSeq;
          for (const auto& x : *p) out << YAML::DoubleQuoted << x;
          out << YAML::EndSeq;
        } else {
          out << *p;
        }
      },
      target);
}

bool present(const Target& target) {
  if (const auto* p = std::get_if<std::optional<int>*>(&target)) return (*p)->has_value();
  return true;
}

void require(bool ok, const char* key, const std::string& why) {
  if (!ok) throw ConfigError(key, why);
}

}  // namespace

SamplerConfig RunConfig::sampler_config() const {
  SamplerConfig s;
  s.method = parse_sampler_method(sampler.method);
  s.steps = sampler_steps();
  s.bounds = action_box();
  s.clip_final = sampler.clip_final;
  return s;
}

void RunConfig::validate() const {
  const auto& sc = schedule;
  require(sc.beta_min > 0, "schedule.beta_min", "must be positive");
  require(sc.beta_max > sc.beta_min, "schedule.beta_max", "must exceed schedule.beta_min");
  require(sc.t_min >= 0 && sc.t_min < 1, "schedule.t_min", "must lie in [0, 1)");
  require(sc.t_max > sc.t_min && sc.t_max <= 1, "schedule.t_max", "must lie in (t_min, 1]");
  require(sc.diffusion_steps >= 1, "schedule.diffusion_steps", "must be >= 1");

  require(net.hidden_layers >= 1, "net.hidden_layers", "must be >= 1");
  require(net.hidden_units >= 1, "net.hidden_units", "must be >= 1");
  require(net.actor_lr > 0, "net.actor_lr", "must be positive");
  require(net.critic_lr > 0, "net.critic_lr", "must be positive");
  require(net.adam_beta1 >= 0 && net.adam_beta1 < 1, "net.adam_beta1", "must lie in [0, 1)");
  require(net.adam_beta2 >= 0 && net.adam_beta2 < 1, "net.adam_beta2", "must lie in [0, 1)");
  require(net.adam_eps > 0, "net.adam_eps", "must be positive");

  require(sac.gamma > 0 && sac.gamma < 1, "sac.gamma", "must lie in (0, 1)");
  require(sac.tau > 0 && sac.tau <= 1, "sac.tau", "must lie in (0, 1]");
  require(sac.beta > 0, "sac.beta", "must be positive");
  require(sac.batch_size >= 1, "sac.batch_size", "must be >= 1");
  require(sac.qne_samples >= 1, "sac.qne_samples", "must be >= 1");
  require(sac.buffer_capacity >= 1, "sac.buffer_capacity", "must be >= 1");
  require(sac.total_steps >= 0, "sac.total_steps", "must be >= 0");
  require(sac.warmup_steps >= 0, "sac.warmup_steps", "must be >= 0");
  require(sac.updates_per_step >= 0, "sac.updates_per_step", "must be >= 0");
  require(sac.log_interval >= 1, "sac.log_interval", "must be >= 1");
  require(sac.checkpoint_interval >= 0 && sac.checkpoint_interval % sac.log_interval == 0,
          "sac.checkpoint_interval", "must be a non-negative multiple of sac.log_interval");
  require(sac.stop_at_coverage >= 0 && sac.stop_at_coverage <= 1, "sac.stop_at_coverage", "must lie in [0, 1]");

  require(sampler.method == "pf_ode" || sampler.method == "ancestral", "sampler.method",
          "must be \"pf_ode\" or \"ancestral\"");
  require(sampler_steps() >= 1, "sampler.steps", "must be >= 1");

  require(env.name == "multigoal" || env.name == "mixture_static", "env.name",
          "must be \"multigoal\" or \"mixture_static\"");
  require(env.goal_distance > 0, "env.goal_distance", "must be positive");
  require(env.velocity_penalty >= 0, "env.velocity_penalty", "must be non-negative");
  require(env.capture_radius > 0, "env.capture_radius", "must be positive");
  require(env.horizon >= 1, "env.horizon", "must be >= 1");
  require(env.arena_half_width > 0, "env.arena_half_width", "must be positive");
  require(env.reset_std >= 0, "env.reset_std", "must be non-negative");
  require(env.mixture_std > 0, "env.mixture_std", "must be positive");
  require(env.action_high > env.action_low, "env.action_high", "must exceed env.action_low");

  require(likelihood_steps() >= 1, "likelihood.steps", "must be >= 1");
  require(likelihood.samples >= 1, "likelihood.samples", "must be >= 1");
  require(likelihood.model == "gaussian" || likelihood.model == "mixture" || likelihood.model == "checkpoint",
          "likelihood.model", "must be \"gaussian\", \"mixture\" or \"checkpoint\"");
  require(likelihood.grid >= 2, "likelihood.grid", "must be >= 2");
  require(likelihood.box_high > likelihood.box_low, "likelihood.box_high", "must exceed likelihood.box_low");

  require(eval.action_candidates >= 1, "eval.action_candidates", "must be >= 1");
  require(eval.interval >= 0, "eval.interval", "must be >= 0");
  require(eval.episodes >= 1, "eval.episodes", "must be >= 1");

  static const std::set<std::string> known{"qne", "idem", "qsm", "is"};
  for (const auto& e : bench.estimators)
    require(known.count(e) == 1, "bench.estimators", "unknown estimator '" + e + "'");
  for (double t : bench.times) require(t > 0 && t <= 1, "bench.times", "times must lie in (0, 1]");
  for (int k : bench.samples) require(k >= 1, "bench.samples", "sample counts must be >= 1");
  require(bench.beta > 0, "bench.beta", "must be positive");
  require(bench.repeats >= 2, "bench.repeats", "must be >= 2");
  require(bench.points >= 1, "bench.points", "must be >= 1");
  require(bench.q == "quadratic" || bench.q == "mixture", "bench.q", "must be \"quadratic\" or \"mixture\"");
  require(bench.curvature > 0, "bench.curvature", "must be positive");
  require(bench.jitter >= 0, "bench.jitter", "must be non-negative");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  const auto table = fields(cfg);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1), e.msg);
  }
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) throw ConfigError("<root>", "expected a mapping of keys and sections");

  std::set<std::string> seen;
  auto apply = [&](const std::string& key, const YAML::Node& value) {
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(key, "unknown key");
    assign(*it, value);
  };
  for (const auto& entry : root) {
    const std::string name = entry.first.as<std::string>();
    if (entry.second.IsMap()) {
      for (const auto& inner : entry.second) apply(name + "." + inner.first.as<std::string>(), inner.second);
    } else {
      apply(name, entry.second);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  YAML::Emitter out;
  out << YAML::BeginMap;
  std::string section;
  for (const auto& f : fields(copy)) {
    const auto dot = f.key.find('.');
    const std::string sec = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (sec != section) {
      if (!section.empty()) out << YAML::EndMap;
      out << YAML::Key << sec << YAML::Value << YAML::BeginMap;
      section = sec;
    }
    if (!present(f.target)) continue;
    out << YAML::Key << name << YAML::Value;
    emit(out, f.target);
  }
  if (!section.empty()) out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace maxentdp
