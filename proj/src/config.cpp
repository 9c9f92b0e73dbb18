#include "specshare/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "specshare/errors.hpp"

namespace specshare {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(value)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
  }
  return value;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, text));
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "traffic.q1", "traffic.q",
      "links.p1", "links.p2", "links.path_gain", "links.mean_fading", "links.noise_power",
      "links.gamma_min", "links.eq2_literal",
      "errors.pm", "errors.pf", "errors.pm1", "errors.pm2", "errors.pm12", "errors.pf_j",
      "jammer.pbar_max", "jammer.p3_cap",
      "sim.n_slots", "sim.seed", "sim.mode", "sim.packet_len",
      "detect.cnn", "detect.fnn", "detect.snr_12", "detect.snr_13", "detect.snr_23",
      "sweep.param", "sweep.grid", "sweep.param2", "sweep.grid2", "sweep.mode",
      "train.sizes", "train.snr_grid", "train.seeds", "train.n_test_per_class",
      "train.batch_size", "train.learning_rate", "train.dropout", "train.profile_n_per_class",
      "train.fnn.n_per_class", "train.fnn.epochs", "train.cnn.n_per_class", "train.cnn.epochs",
  };
  return keys;
}

const std::vector<std::string>& profile_fields() {
  static const std::vector<std::string> fields{"pm", "pf", "pm1", "pm2", "pm12", "pf_j"};
  return fields;
}

double& profile_field(DetectorErrorProfile& p, const std::string& field) {
  if (field == "pm") return p.pm;
  if (field == "pf") return p.pf;
  if (field == "pm1") return p.pm1;
  if (field == "pm2") return p.pm2;
  if (field == "pm12") return p.pm12;
  if (field == "pf_j") return p.pf_j;
  throw ConfigError(fmt::format("unknown detector error field '{}'", field));
}

// links.g.ik / links.h.ik with i, k in 1..3.
bool is_link_key(const std::string& key, char kind, int& i, int& k) {
  const std::string prefix = fmt::format("links.{}.", kind);
  if (key.size() != prefix.size() + 2 || key.compare(0, prefix.size(), prefix) != 0) return false;
  i = key[prefix.size()] - '0';
  k = key[prefix.size() + 1] - '0';
  return i >= 1 && i <= 3 && k >= 1 && k <= 3;
}

// profile.<N>.<field>
bool is_profile_key(const std::string& key, std::size_t& n, std::string& field) {
  if (key.rfind("profile.", 0) != 0) return false;
  const auto dot = key.find('.', 8);
  if (dot == std::string::npos) return false;
  const std::string size = key.substr(8, dot - 8);
  if (size.empty() || !std::all_of(size.begin(), size.end(), ::isdigit)) return false;
  n = std::stoul(size);
  field = key.substr(dot + 1);
  return std::find(profile_fields().begin(), profile_fields().end(), field) != profile_fields().end();
}

template <typename T>
std::vector<T> to_integers(const std::vector<double>& values, const std::string& key) {
  std::vector<T> out;
  for (double v : values) {
    if (v < 0 || v != std::floor(v)) throw ConfigError(fmt::format("{}: {} is not a non-negative integer", key, v));
    out.push_back(static_cast<T>(v));
  }
  return out;
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key=value", origin, line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, line_no));
    map.set(key, trim(line.substr(eq + 1)));
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigMap::merge(const ConfigMap& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

void ConfigMap::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool ConfigMap::contains(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

std::uint64_t ConfigMap::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  return v ? parse_uint(*v, key) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, *v));
}

std::vector<double> ConfigMap::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto v = get(key);
  return v ? parse_list(*v, key) : fallback;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(part, key));
  if (values.empty()) throw ConfigError(fmt::format("{}: empty list", key));
  return values;
}

std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  if (text.find(':') == std::string::npos) return parse_list(text, key);
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(fmt::format("{}: expected lo:hi:step, got '{}'", key, text));
  const double lo = parse_double(parts[0], key);
  const double hi = parse_double(parts[1], key);
  const double step = parse_double(parts[2], key);
  if (!(step > 0.0) || hi < lo) {
    throw ConfigError(fmt::format("{}: '{}' needs lo <= hi and a positive step", key, text));
  }
  const double span = (hi - lo) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (count > 1000000) throw ConfigError(fmt::format("{}: grid has too many points", key));
  std::vector<double> values;
  for (std::size_t i = 0; i < count; ++i) {
    // Round away accumulated binary noise so 0.05 steps print as 0.05, 0.1, ...
    values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return values;
}

SweepMode parse_sweep_mode(const std::string& text) {
  if (text == "analytic") return SweepMode::Analytic;
  if (text == "simulate") return SweepMode::Simulate;
  if (text == "both") return SweepMode::Both;
  throw ConfigError(fmt::format("mode must be analytic, simulate or both, got '{}'", text));
}

const char* to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::Analytic: return "analytic";
    case SweepMode::Simulate: return "simulate";
    case SweepMode::Both: return "both";
  }
  return "?";
}

void SweepSpec::validate() const {
  const auto& names = sweep_parameters();
  auto check = [&](const std::string& name, const std::vector<double>& grid, const char* key) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError(fmt::format("sweep.{}: unknown parameter '{}' (expected one of {})", key, name,
                                    fmt::join(names, ", ")));
    }
    if (grid.empty()) throw ConfigError(fmt::format("sweep grid for '{}' is empty", name));
    for (double v : grid) {
      const bool probability = name == "q1" || name == "q";
      if (probability && !(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(fmt::format("sweep grid for '{}' has {} outside [0,1]", name, v));
      }
      if (name == "pbar_max" && !(v >= 0.0)) {
        throw ConfigError(fmt::format("sweep grid for pbar_max has negative value {}", v));
      }
      if (name == "packet_len" && !(v >= 3.0 && v == std::floor(v))) {
        throw ConfigError(fmt::format("sweep grid for packet_len has invalid size {}", v));
      }
    }
  };
  check(param, grid, "param");
  if (param2) {
    check(*param2, grid2, "param2");
    if (*param2 == param) throw ConfigError("sweep.param2 must differ from sweep.param");
  }
}

void TrainSpec::validate() const {
  if (sizes.empty() || snr_grid.empty() || seeds.empty()) {
    throw ConfigError("train.sizes, train.snr_grid and train.seeds must be nonempty");
  }
  for (std::size_t n : sizes) {
    if (n < 3) throw ConfigError(fmt::format("train.sizes: packet length {} is below the kernel width", n));
  }
  if (fnn.n_per_class == 0 || cnn.n_per_class == 0 || n_test_per_class == 0 || profile_n_per_class == 0) {
    throw ConfigError("training and test set sizes must be positive");
  }
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("train.dropout must be in [0,1)");
}

DetectorErrorProfile AppConfig::profile_for(std::size_t packet_len) const {
  DetectorErrorProfile p = base_errors;
  if (const auto it = profiles.find(packet_len); it != profiles.end()) p = it->second;
  for (const auto& [field, value] : error_overrides) profile_field(p, field) = value;
  return p;
}

AppConfig build_app_config(const ConfigMap& map) {
  for (const auto& [key, value] : map.entries()) {
    int i = 0, k = 0;
    std::size_t n = 0;
    std::string field;
    if (known_keys().count(key) || is_link_key(key, 'g', i, k) || is_link_key(key, 'h', i, k) ||
        is_profile_key(key, n, field)) {
      continue;
    }
    throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  }

  AppConfig app;
  ScenarioConfig& s = app.scenario;
  s = ScenarioConfig::defaults();

  s.traffic.q1 = map.get_double("traffic.q1", s.traffic.q1);
  s.traffic.q = map.get_double("traffic.q", s.traffic.q);

  LinkBudget& links = s.links;
  links.tx_power[0] = map.get_double("links.p1", links.tx_power[0]);
  links.tx_power[1] = map.get_double("links.p2", links.tx_power[1]);
  app.p2_reference = links.tx_power[1];
  if (map.contains("links.path_gain")) {
    const double g = map.get_double("links.path_gain", 0.0);
    for (auto& row : links.path_gain) row.fill(g);
  }
  if (map.contains("links.mean_fading")) {
    const double h = map.get_double("links.mean_fading", 0.0);
    for (auto& row : links.mean_fading) row.fill(h);
  }
  for (const auto& [key, value] : map.entries()) {
    int i = 0, k = 0;
    if (is_link_key(key, 'g', i, k)) links.path_gain[i - 1][k - 1] = map.get_double(key, 0.0);
    if (is_link_key(key, 'h', i, k)) links.mean_fading[i - 1][k - 1] = map.get_double(key, 0.0);
  }
  links.noise_power = map.get_double("links.noise_power", links.noise_power);
  links.sinr_threshold = map.get_double("links.gamma_min", links.sinr_threshold);
  s.form = map.get_bool("links.eq2_literal", false) ? SuccessForm::Literal : SuccessForm::RayleighOutage;

  for (const auto& field : profile_fields()) {
    const std::string key = "errors." + field;
    if (map.contains(key)) app.error_overrides[field] = map.get_double(key, 0.0);
  }
  for (const auto& [key, value] : map.entries()) {
    std::size_t n = 0;
    std::string field;
    if (!is_profile_key(key, n, field)) continue;
    auto [it, inserted] = app.profiles.try_emplace(n, ScenarioConfig::default_profile());
    profile_field(it->second, field) = map.get_double(key, 0.0);
  }
  for (const auto& [n, profile] : app.profiles) {
    try {
      profile.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(fmt::format("profile.{}: {}", n, e.what()));
    }
  }

  s.pbar_max = map.get_double("jammer.pbar_max", s.pbar_max);
  if (map.contains("jammer.p3_cap")) s.p3_cap = map.get_double("jammer.p3_cap", 0.0);

  s.n_slots = map.get_uint("sim.n_slots", s.n_slots);
  s.seed = map.get_uint("sim.seed", s.seed);
  s.packet_len = map.get_uint("sim.packet_len", s.packet_len);
  if (const auto mode = map.get("sim.mode")) {
    if (*mode == "probabilistic") {
      s.mode = SensingMode::Probabilistic;
    } else if (*mode == "signal") {
      s.mode = SensingMode::Signal;
    } else {
      throw ConfigError(fmt::format("sim.mode must be probabilistic or signal, got '{}'", *mode));
    }
  }
  s.errors = app.profile_for(s.packet_len);

  if (const auto p = map.get("detect.cnn")) app.cnn_weights = *p;
  if (const auto p = map.get("detect.fnn")) app.fnn_weights = *p;
  app.detection_snrs.incumbent_at_secondary = map.get_double("detect.snr_12", 0.0);
  app.detection_snrs.incumbent_at_jammer = map.get_double("detect.snr_13", 0.0);
  app.detection_snrs.secondary_at_jammer = map.get_double("detect.snr_23", 0.0);

  SweepSpec& sw = app.sweep;
  if (const auto p = map.get("sweep.param")) sw.param = *p;
  if (const auto g = map.get("sweep.grid")) sw.grid = parse_grid(*g, "sweep.grid");
  if (const auto p = map.get("sweep.param2")) {
    sw.param2 = *p;
    const auto g = map.get("sweep.grid2");
    if (!g) throw ConfigError("sweep.param2 is set but sweep.grid2 is missing");
    sw.grid2 = parse_grid(*g, "sweep.grid2");
  } else if (map.contains("sweep.grid2")) {
    throw ConfigError("sweep.grid2 is set but sweep.param2 is missing");
  }
  if (const auto m = map.get("sweep.mode")) sw.mode = parse_sweep_mode(*m);
  sw.validate();

  TrainSpec& t = app.train;
  if (map.contains("train.sizes")) t.sizes = to_integers<std::size_t>(map.get_doubles("train.sizes", {}), "train.sizes");
  t.snr_grid = map.get_doubles("train.snr_grid", t.snr_grid);
  if (map.contains("train.seeds")) t.seeds = to_integers<std::uint64_t>(map.get_doubles("train.seeds", {}), "train.seeds");
  t.fnn.n_per_class = map.get_uint("train.fnn.n_per_class", t.fnn.n_per_class);
  t.fnn.epochs = map.get_uint("train.fnn.epochs", t.fnn.epochs);
  t.cnn.n_per_class = map.get_uint("train.cnn.n_per_class", t.cnn.n_per_class);
  t.cnn.epochs = map.get_uint("train.cnn.epochs", t.cnn.epochs);
  t.n_test_per_class = map.get_uint("train.n_test_per_class", t.n_test_per_class);
  t.batch_size = map.get_uint("train.batch_size", t.batch_size);
  t.learning_rate = map.get_double("train.learning_rate", t.learning_rate);
  t.dropout = map.get_double("train.dropout", t.dropout);
  t.profile_n_per_class = map.get_uint("train.profile_n_per_class", t.profile_n_per_class);
  t.validate();

  try {
    s.traffic.validate();
    s.links.validate();
    s.errors.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (!(s.pbar_max >= 0.0)) throw ConfigError("jammer.pbar_max must be >= 0");
  if (s.p3_cap && !(*s.p3_cap >= 0.0)) throw ConfigError("jammer.p3_cap must be >= 0");
  if (s.n_slots < 1) throw ConfigError("sim.n_slots must be >= 1");
  if (s.packet_len < 3) throw ConfigError("sim.packet_len must be at least 3");
  return app;
}

std::string profiles_to_text(const std::map<std::size_t, DetectorErrorProfile>& profiles) {
  std::string out;
  for (const auto& [n, p] : profiles) {
    DetectorErrorProfile copy = p;
    for (const auto& field : profile_fields()) {
      out += fmt::format("profile.{}.{}={:.17g}\n", n, field, profile_field(copy, field));
    }
  }
  return out;
}

}  // namespace specshare
