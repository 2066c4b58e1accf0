#include "rtdyn/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rtdyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* what) {
  throw std::invalid_argument("config: " + std::string(key) + "=" + std::string(value) + ": " + what);
}

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0;
  const char* end = v.data() + v.size();
  auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || std::isnan(x)) bad_value(key, v, "expected a number");
  return x;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int x = 0;
  const char* end = v.data() + v.size();
  auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) bad_value(key, v, "expected an integer");
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  bad_value(key, v, "expected on/off");
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Field {
  std::string key;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

Field dbl(std::string key, double PipelineConfig::*p) {
  return {key, [key, p](PipelineConfig& c, std::string_view v) { c.*p = to_double(key, v); },
          [p](const PipelineConfig& c) { return fmt(c.*p); }};
}
Field integer(std::string key, int PipelineConfig::*p) {
  return {key, [key, p](PipelineConfig& c, std::string_view v) { c.*p = to_int<int>(key, v); },
          [p](const PipelineConfig& c) { return std::to_string(c.*p); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      dbl("dt", &PipelineConfig::dt),
      dbl("lag", &PipelineConfig::lag),
      integer("m", &PipelineConfig::m),
      integer("n", &PipelineConfig::n),
      integer("n_xi", &PipelineConfig::n_xi),
      dbl("gamma_rel", &PipelineConfig::gamma_rel),
      dbl("gamma_abs", &PipelineConfig::gamma_abs),
      dbl("scale_exponent", &PipelineConfig::scale_exponent),
      dbl("lambda", &PipelineConfig::lambda),
      dbl("half_width", &PipelineConfig::half_width),
      dbl("floor_hz", &PipelineConfig::floor_hz),
      integer("harmonics", &PipelineConfig::harmonics),
      integer("order", &PipelineConfig::order),
      dbl("eta", &PipelineConfig::eta),
      {"polarity",
       [](PipelineConfig& c, std::string_view v) {
         if (v != "R" && v != "S") bad_value("polarity", v, "expected R or S");
         c.polarity = std::string(v);
       },
       [](const PipelineConfig& c) { return c.polarity; }},
      {"pvc", [](PipelineConfig& c, std::string_view v) { c.pvc = to_bool("pvc", v); },
       [](const PipelineConfig& c) { return std::string(c.pvc ? "on" : "off"); }},
      dbl("pvc_ratio", &PipelineConfig::pvc_ratio),
      integer("pvc_history", &PipelineConfig::pvc_history),
      dbl("refractory_ms", &PipelineConfig::refractory_ms),
      dbl("threshold_fraction", &PipelineConfig::threshold_fraction),
      dbl("baseline_window", &PipelineConfig::baseline_window),
      dbl("ke0", &PipelineConfig::ke0),
      {"seed", [](PipelineConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>("seed", v); },
       [](const PipelineConfig& c) { return std::to_string(c.seed); }},
      dbl("sim_dt", &PipelineConfig::sim_dt),
      dbl("sim_duration", &PipelineConfig::sim_duration),
      dbl("snr_db", &PipelineConfig::snr_db),
  };
  return f;
}

const Field& field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + key + ": " + what);
}

}  // namespace

SSTConfig PipelineConfig::sst() const {
  SSTConfig c;
  c.dt = dt;
  c.lag = lag;
  c.m = m;
  c.n = n;
  c.n_xi = n_xi;
  c.gamma_rel = gamma_rel;
  c.gamma_abs = gamma_abs;
  c.scale_exponent = scale_exponent;
  return c;
}

NRRParams PipelineConfig::nrr() const { return {half_width, floor_hz, harmonics}; }

PeakDetectorParams PipelineConfig::detector() const {
  PeakDetectorParams p;
  p.refractory_ms = refractory_ms;
  p.threshold_fraction = threshold_fraction;
  return p;
}

void PipelineConfig::validate() const {
  try {
    sst().validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  require(lambda >= 0, "lambda", "must be >= 0");
  require(half_width >= 0, "half_width", "must be >= 0");
  require(floor_hz >= 0, "floor_hz", "must be >= 0");
  require(harmonics >= 1, "harmonics", "must be >= 1");
  require(order >= 3, "order", "must be >= 3");
  require(eta > 0, "eta", "must be positive");
  require(pvc_ratio >= 0 && pvc_ratio < 1, "pvc_ratio", "must lie in [0, 1)");
  require(pvc_history >= 1, "pvc_history", "must be >= 1");
  require(refractory_ms >= 0, "refractory_ms", "must be >= 0");
  require(threshold_fraction >= 0, "threshold_fraction", "must be >= 0");
  require(baseline_window > 0, "baseline_window", "must be positive");
  require(ke0 > 0, "ke0", "must be positive");
  require(sim_dt > 0, "sim_dt", "must be positive");
  require(sim_duration > sim_dt, "sim_duration", "must exceed sim_dt");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  field(trim(key)).set(cfg, trim(value));
}

std::string get_config_value(const PipelineConfig& cfg, std::string_view key) { return field(key).get(cfg); }

void apply_config_text(PipelineConfig& base, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  apply_config_text(cfg, text);
  cfg.validate();
  return cfg;
}

std::string canonical_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += f.key + "=" + f.get(cfg) + "\n";
  return out;
}

}  // namespace rtdyn
