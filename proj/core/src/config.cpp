#include "oedda/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "oedda/errors.hpp"

namespace oedda {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Field {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field int_field(std::string name, T ExperimentConfig::*member) {
  return {name,
          [member, name](ExperimentConfig& c, const std::string& v) { c.*member = static_cast<T>(parse_integer(v, name)); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(std::string name, double ExperimentConfig::*member) {
  return {name, [member, name](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(v, name); },
          [member](const ExperimentConfig& c) { return format_double(c.*member); }};
}

template <typename M>
Field model_field(std::string name, M TwoLayerParams::*member) {
  return {name,
          [member, name](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_same_v<M, int>) {
              c.model.*member = static_cast<int>(parse_integer(v, name));
            } else {
              c.model.*member = parse_double(v, name);
            }
          },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_same_v<M, int>) {
              return std::to_string(c.model.*member);
            } else {
              return format_double(c.model.*member);
            }
          }};
}

template <typename Parse, typename Print, typename Member>
Field enum_field(std::string name, Member ExperimentConfig::*member, Parse parse, Print print) {
  return {name,
          [member, parse](ExperimentConfig& c, const std::string& v) {
            try {
              c.*member = parse(v);
            } catch (const Error& e) {
              throw ConfigError(e.what());
            }
          },
          [member, print](const ExperimentConfig& c) { return std::string(print(c.*member)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(model_field("model.K", &TwoLayerParams::K));
    f.push_back(model_field("model.J", &TwoLayerParams::J));
    f.push_back(model_field("model.F", &TwoLayerParams::F));
    f.push_back(model_field("model.h", &TwoLayerParams::h));
    f.push_back(model_field("model.c", &TwoLayerParams::c));
    f.push_back(model_field("model.b", &TwoLayerParams::b));
    f.push_back(double_field("forecast_forcing", &ExperimentConfig::forecast_forcing));
    f.push_back(double_field("dt", &ExperimentConfig::dt));
    f.push_back(int_field("total_steps", &ExperimentConfig::total_steps));
    f.push_back(int_field("obs_frequency", &ExperimentConfig::obs_frequency));
    f.push_back(int_field("spinup_steps", &ExperimentConfig::spinup_steps));
    f.push_back(double_field("spinup_perturbation", &ExperimentConfig::spinup_perturbation));
    f.push_back(int_field("obs_stride", &ExperimentConfig::obs_stride));
    f.push_back(double_field("obs_noise_fraction", &ExperimentConfig::obs_noise_fraction));
    f.push_back(double_field("background_noise_fraction", &ExperimentConfig::background_noise_fraction));
    f.push_back(int_field("ensemble_size", &ExperimentConfig::ensemble_size));
    f.push_back(enum_field(
        "scheme", &ExperimentConfig::scheme, [](const std::string& v) { return parse_analysis_scheme(v); },
        [](AnalysisScheme s) { return to_string(s); }));
    f.push_back(enum_field(
        "mode", &ExperimentConfig::mode, [](const std::string& v) { return parse_run_mode(v); },
        [](RunMode m) { return to_string(m); }));
    f.push_back(enum_field(
        "kernel", &ExperimentConfig::kernel, [](const std::string& v) { return parse_kernel_family(v); },
        [](KernelFamily k) { return to_string(k); }));
    f.push_back(enum_field(
        "localization_space", &ExperimentConfig::localization_space,
        [](const std::string& v) { return parse_localization_space(v); },
        [](LocalizationSpace s) { return to_string(s); }));
    f.push_back(double_field("inflation", &ExperimentConfig::inflation));
    f.push_back(double_field("localization_radius", &ExperimentConfig::localization_radius));
    f.push_back(double_field("inflation_lower", &ExperimentConfig::inflation_lower));
    f.push_back(double_field("inflation_upper", &ExperimentConfig::inflation_upper));
    f.push_back(double_field("radius_lower", &ExperimentConfig::radius_lower));
    f.push_back(double_field("radius_upper", &ExperimentConfig::radius_upper));
    f.push_back(double_field("penalty", &ExperimentConfig::penalty));
    f.push_back({"warm_start",
                 [](ExperimentConfig& c, const std::string& v) { c.warm_start = parse_bool(v, "warm_start"); },
                 [](const ExperimentConfig& c) { return std::string(c.warm_start ? "true" : "false"); }});
    f.push_back(double_field("infeasible_penalty", &ExperimentConfig::infeasible_penalty));
    f.push_back({"optimizer.ftol",
                 [](ExperimentConfig& c, const std::string& v) { c.optimizer.ftol = parse_double(v, "optimizer.ftol"); },
                 [](const ExperimentConfig& c) { return format_double(c.optimizer.ftol); }});
    f.push_back({"optimizer.max_iters",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.optimizer.max_iters = static_cast<int>(parse_integer(v, "optimizer.max_iters"));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.optimizer.max_iters); }});
    f.push_back({"optimizer.initial_step",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.optimizer.initial_step = parse_double(v, "optimizer.initial_step");
                 },
                 [](const ExperimentConfig& c) { return format_double(c.optimizer.initial_step); }});
    f.push_back({"optimizer.pgtol",
                 [](ExperimentConfig& c, const std::string& v) { c.optimizer.pgtol = parse_double(v, "optimizer.pgtol"); },
                 [](const ExperimentConfig& c) { return format_double(c.optimizer.pgtol); }});
    f.push_back({"optimizer.memory",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.optimizer.memory = static_cast<int>(parse_integer(v, "optimizer.memory"));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.optimizer.memory); }});
    f.push_back(int_field("seed_truth", &ExperimentConfig::seed_truth));
    f.push_back(int_field("seed_obs", &ExperimentConfig::seed_obs));
    f.push_back(int_field("seed_ensemble", &ExperimentConfig::seed_ensemble));
    f.push_back(int_field("seed_filter", &ExperimentConfig::seed_filter));
    f.push_back(double_field("test_window_start", &ExperimentConfig::test_window_start));
    f.push_back(double_field("test_window_end", &ExperimentConfig::test_window_end));
    f.push_back(double_field("divergence_factor", &ExperimentConfig::divergence_factor));
    f.push_back({"trajectory_indices",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.trajectory_indices.clear();
                   for (const auto& item : split_list(v)) {
                     c.trajectory_indices.push_back(static_cast<int>(parse_integer(item, "trajectory_indices")));
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.trajectory_indices.size(); ++i) {
                     if (i) s += ", ";
                     s += std::to_string(c.trajectory_indices[i]);
                   }
                   return s;
                 }});
    return f;
  }();
  return table;
}

}  // namespace

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty value for '" + key + "'");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects a number, got '" + t + "'");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + t + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + t + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_key_values(ExperimentConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "seed") {
      const long long base = parse_integer(value, key);
      if (base < 0) throw ConfigError("seed must be non-negative");
      cfg.set_seed(static_cast<std::uint64_t>(base));
      continue;
    }
    bool found = false;
    for (const Field& f : fields()) {
      if (f.name == key) {
        f.set(cfg, value);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("unknown configuration key '" + key + "'");
  }
}

KeyValues to_key_values(const ExperimentConfig& cfg) {
  KeyValues out;
  for (const Field& f : fields()) out.emplace_back(f.name, f.get(cfg));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out{"seed"};
  for (const Field& f : fields()) out.push_back(f.name);
  return out;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg = base;
  apply_key_values(cfg, parse_key_values(in));
  return cfg;
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : to_key_values(cfg)) out += k + " = " + v + "\n";
  return out;
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write config file '" + path + "'");
  out << format_config(cfg);
}

}  // namespace oedda
