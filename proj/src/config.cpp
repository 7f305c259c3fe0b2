#include "predsaddle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "predsaddle/csv.hpp"

namespace predsaddle {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bilinear_orbit: return "bilinear_orbit";
    case ExperimentKind::spectral: return "spectral";
    case ExperimentKind::ode_tracking: return "ode_tracking";
    case ExperimentKind::theorem_rate: return "theorem_rate";
    case ExperimentKind::toygan: return "toygan";
  }
  throw std::logic_error("unreachable experiment kind");
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "bilinear_orbit") return ExperimentKind::bilinear_orbit;
  if (name == "spectral") return ExperimentKind::spectral;
  if (name == "ode_tracking") return ExperimentKind::ode_tracking;
  if (name == "theorem_rate") return ExperimentKind::theorem_rate;
  if (name == "toygan") return ExperimentKind::toygan;
  throw ConfigError("unknown experiment '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not an unsigned integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("not a boolean (true/false): '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  for (const auto& tok : split(s, ',')) {
    const auto t = trim(tok);
    if (t.empty()) throw ConfigError("empty entry in seed list");
    seeds.push_back(parse_u64(t));
  }
  return seeds;
}

Vec parse_vector(const std::string& s) {
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_double(tok));
  if (vals.empty()) throw ConfigError("empty vector value");
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Mat parse_matrix(const std::string& s) {
  std::vector<Vec> rows;
  for (const auto& row_str : split(s, ';')) {
    rows.push_back(parse_vector(trim(row_str)));
    if (rows.back().size() != rows.front().size())
      throw ConfigError("matrix rows have unequal lengths");
  }
  Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

std::string serialize_vector(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string serialize_matrix(const Mat& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += "; ";
    out += serialize_vector(m.row(r));
  }
  return out;
}

std::string serialize_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

const std::set<std::string> kCommonKeys = {"experiment", "method", "seeds", "output_dir"};

const std::map<ExperimentKind, std::set<std::string>> kAllowedKeys = {
    {ExperimentKind::bilinear_orbit,
     {"k_matrix", "alpha", "beta", "n_steps", "record_every", "updater", "momentum",
      "learning_rate", "adam_beta1", "adam_beta2", "adam_epsilon", "u0", "v0", "noise_std"}},
    {ExperimentKind::spectral, {"k_matrix", "alpha", "beta"}},
    {ExperimentKind::ode_tracking, {"k_matrix", "alpha", "beta", "horizon", "u0", "v0"}},
    {ExperimentKind::theorem_rate,
     {"k_matrix", "mu", "noise_std", "c_alpha", "c_beta", "n_steps", "fit_l_min", "u0", "v0"}},
    {ExperimentKind::toygan,
     {"n_modes", "radius", "sigma", "batch_size", "n_steps", "record_every", "learning_rate",
      "adam_beta1", "adam_beta2", "adam_epsilon", "eval_every", "n_probe", "objective",
      "threshold_sigmas", "min_fraction", "dump_samples"}},
};

const std::map<ExperimentKind, std::set<std::string>> kRequiredKeys = {
    {ExperimentKind::bilinear_orbit, {"k_matrix", "alpha", "beta", "n_steps", "seeds"}},
    {ExperimentKind::spectral, {"k_matrix", "alpha", "beta"}},
    {ExperimentKind::ode_tracking, {"k_matrix", "alpha", "beta", "horizon"}},
    {ExperimentKind::theorem_rate,
     {"k_matrix", "mu", "noise_std", "c_alpha", "c_beta", "n_steps", "seeds"}},
    {ExperimentKind::toygan, {"n_modes", "radius", "sigma", "batch_size", "n_steps", "seeds"}},
};

void validate(const ExperimentConfig& cfg, const std::set<std::string>& present) {
  const auto& allowed = kAllowedKeys.at(cfg.experiment);
  for (const auto& key : present) {
    if (kCommonKeys.count(key) || allowed.count(key)) continue;
    throw ConfigError("key '" + key + "' does not apply to experiment '" +
                      to_string(cfg.experiment) + "'");
  }
  for (const auto& key : kRequiredKeys.at(cfg.experiment)) {
    if (!present.count(key))
      throw ConfigError("experiment '" + to_string(cfg.experiment) + "' requires key '" + key +
                        "'");
  }
  if (cfg.method != "plain" && cfg.method != "predict" && cfg.method != "both")
    throw ConfigError("method must be plain, predict, or both");
  if (cfg.experiment == ExperimentKind::theorem_rate && cfg.method != "predict")
    throw ConfigError("theorem_rate runs the prediction method; set method = predict");
  if (cfg.updater && *cfg.updater != "sgd" && *cfg.updater != "momentum" && *cfg.updater != "adam")
    throw ConfigError("updater must be sgd, momentum, or adam");
  if (cfg.objective && *cfg.objective != "saturating" && *cfg.objective != "non_saturating")
    throw ConfigError("objective must be saturating or non_saturating");
  const bool needs_seeds = cfg.experiment == ExperimentKind::bilinear_orbit ||
                           cfg.experiment == ExperimentKind::theorem_rate ||
                           cfg.experiment == ExperimentKind::toygan;
  if (needs_seeds && cfg.seeds.empty()) throw ConfigError("seeds list must not be empty");
  if (cfg.n_steps && *cfg.n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (cfg.record_every && *cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> present;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"experiment", [&](const std::string& v) { cfg.experiment = experiment_from_string(v); }},
      {"method", [&](const std::string& v) { cfg.method = v; }},
      {"seeds", [&](const std::string& v) { cfg.seeds = parse_seed_list(v); }},
      {"output_dir", [&](const std::string& v) { cfg.output_dir = v; }},
      {"k_matrix", [&](const std::string& v) { cfg.k_matrix = parse_matrix(v); }},
      {"mu", [&](const std::string& v) { cfg.mu = parse_double(v); }},
      {"noise_std", [&](const std::string& v) { cfg.noise_std = parse_double(v); }},
      {"alpha", [&](const std::string& v) { cfg.alpha = parse_double(v); }},
      {"beta", [&](const std::string& v) { cfg.beta = parse_double(v); }},
      {"c_alpha", [&](const std::string& v) { cfg.c_alpha = parse_double(v); }},
      {"c_beta", [&](const std::string& v) { cfg.c_beta = parse_double(v); }},
      {"updater", [&](const std::string& v) { cfg.updater = v; }},
      {"momentum", [&](const std::string& v) { cfg.momentum = parse_double(v); }},
      {"learning_rate", [&](const std::string& v) { cfg.learning_rate = parse_double(v); }},
      {"adam_beta1", [&](const std::string& v) { cfg.adam_beta1 = parse_double(v); }},
      {"adam_beta2", [&](const std::string& v) { cfg.adam_beta2 = parse_double(v); }},
      {"adam_epsilon", [&](const std::string& v) { cfg.adam_epsilon = parse_double(v); }},
      {"n_steps", [&](const std::string& v) { cfg.n_steps = parse_int(v); }},
      {"record_every", [&](const std::string& v) { cfg.record_every = parse_int(v); }},
      {"u0", [&](const std::string& v) { cfg.u0 = parse_vector(v); }},
      {"v0", [&](const std::string& v) { cfg.v0 = parse_vector(v); }},
      {"horizon", [&](const std::string& v) { cfg.horizon = parse_double(v); }},
      {"fit_l_min", [&](const std::string& v) { cfg.fit_l_min = parse_int(v); }},
      {"n_modes", [&](const std::string& v) { cfg.n_modes = parse_int(v); }},
      {"radius", [&](const std::string& v) { cfg.radius = parse_double(v); }},
      {"sigma", [&](const std::string& v) { cfg.sigma = parse_double(v); }},
      {"batch_size", [&](const std::string& v) { cfg.batch_size = parse_int(v); }},
      {"objective", [&](const std::string& v) { cfg.objective = v; }},
      {"eval_every", [&](const std::string& v) { cfg.eval_every = parse_int(v); }},
      {"n_probe", [&](const std::string& v) { cfg.n_probe = parse_int(v); }},
      {"threshold_sigmas", [&](const std::string& v) { cfg.threshold_sigmas = parse_double(v); }},
      {"min_fraction", [&](const std::string& v) { cfg.min_fraction = parse_double(v); }},
      {"dump_samples", [&](const std::string& v) { cfg.dump_samples = parse_bool(v); }},
  };

  bool has_experiment = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    if (value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": missing value for '" + key + "'");
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (present.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ", key '" + key + "': " + e.what());
    }
    present.insert(key);
    if (key == "experiment") has_experiment = true;
  }
  if (!has_experiment) throw ConfigError("missing required key 'experiment'");
  validate(cfg, present);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto emit = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  emit("experiment", to_string(cfg.experiment));
  emit("method", cfg.method);
  if (!cfg.seeds.empty()) emit("seeds", serialize_seeds(cfg.seeds));
  emit("output_dir", cfg.output_dir);
  if (cfg.k_matrix) emit("k_matrix", serialize_matrix(*cfg.k_matrix));
  if (cfg.mu) emit("mu", format_double(*cfg.mu));
  if (cfg.noise_std) emit("noise_std", format_double(*cfg.noise_std));
  if (cfg.alpha) emit("alpha", format_double(*cfg.alpha));
  if (cfg.beta) emit("beta", format_double(*cfg.beta));
  if (cfg.c_alpha) emit("c_alpha", format_double(*cfg.c_alpha));
  if (cfg.c_beta) emit("c_beta", format_double(*cfg.c_beta));
  if (cfg.updater) emit("updater", *cfg.updater);
  if (cfg.momentum) emit("momentum", format_double(*cfg.momentum));
  if (cfg.learning_rate) emit("learning_rate", format_double(*cfg.learning_rate));
  if (cfg.adam_beta1) emit("adam_beta1", format_double(*cfg.adam_beta1));
  if (cfg.adam_beta2) emit("adam_beta2", format_double(*cfg.adam_beta2));
  if (cfg.adam_epsilon) emit("adam_epsilon", format_double(*cfg.adam_epsilon));
  if (cfg.n_steps) emit("n_steps", std::to_string(*cfg.n_steps));
  if (cfg.record_every) emit("record_every", std::to_string(*cfg.record_every));
  if (cfg.u0) emit("u0", serialize_vector(*cfg.u0));
  if (cfg.v0) emit("v0", serialize_vector(*cfg.v0));
  if (cfg.horizon) emit("horizon", format_double(*cfg.horizon));
  if (cfg.fit_l_min) emit("fit_l_min", std::to_string(*cfg.fit_l_min));
  if (cfg.n_modes) emit("n_modes", std::to_string(*cfg.n_modes));
  if (cfg.radius) emit("radius", format_double(*cfg.radius));
  if (cfg.sigma) emit("sigma", format_double(*cfg.sigma));
  if (cfg.batch_size) emit("batch_size", std::to_string(*cfg.batch_size));
  if (cfg.objective) emit("objective", *cfg.objective);
  if (cfg.eval_every) emit("eval_every", std::to_string(*cfg.eval_every));
  if (cfg.n_probe) emit("n_probe", std::to_string(*cfg.n_probe));
  if (cfg.threshold_sigmas) emit("threshold_sigmas", format_double(*cfg.threshold_sigmas));
  if (cfg.min_fraction) emit("min_fraction", format_double(*cfg.min_fraction));
  if (cfg.dump_samples) emit("dump_samples", *cfg.dump_samples ? "true" : "false");
  return out;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return serialize_config(*this) == serialize_config(other);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace predsaddle
