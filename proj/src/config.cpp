#include "sslmseg/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "sslmseg/byte_io.hpp"
#include "sslmseg/error.hpp"

namespace sslmseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw FormatError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                      "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw FormatError("config key '" + std::string(key) + "': expected true or false");
}

using KeyValues = std::map<std::string, std::string>;

KeyValues feature_keys(const RunConfig& c) {
  const auto& p = c.params;
  KeyValues kv;
  kv["sample_rate"] = std::to_string(p.sample_rate);
  kv["window"] = std::to_string(p.window_samples);
  kv["overlap"] = num(p.overlap);
  kv["n_mels"] = std::to_string(p.n_mels);
  kv["fmin_hz"] = num(p.fmin_hz);
  kv["fmax_hz"] = num(p.fmax_hz);
  kv["lag_seconds"] = num(p.lag_seconds);
  kv["pool"] = std::to_string(p.pool);
  kv["pool1"] = std::to_string(p.pool1);
  kv["pool2"] = std::to_string(p.pool2);
  kv["stack"] = std::to_string(p.stack);
  kv["quantile"] = num(p.quantile);
  kv["pad_frames"] = std::to_string(p.final_pad);
  kv["floor_db"] = num(p.floor_db);
  std::string inputs;
  for (const auto& in : c.inputs()) inputs += (inputs.empty() ? "" : ",") + in.name();
  kv["inputs"] = inputs;
  kv["pooling"] = to_string(c.pooling);
  return kv;
}

std::string join(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace

std::string InputSpec::name() const { return is_mls ? "mls" : "sslm-" + to_string(sslm); }

std::string to_string(const SslmSelection& s) {
  return to_string(s.feature) + "-" + to_string(s.metric);
}

SslmSelection parse_sslm_selection(std::string_view name) {
  if (name.starts_with("sslm-")) name.remove_prefix(5);
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) {
    throw FormatError("SSLM selection '" + std::string(name) + "' is not <feature>-<metric>");
  }
  const auto f = name.substr(0, dash);
  const auto m = name.substr(dash + 1);
  SslmSelection s;
  if (f == "mfcc") {
    s.feature = FeatureType::mfcc_like;
  } else if (f == "chroma") {
    s.feature = FeatureType::chroma;
  } else {
    throw FormatError("unknown SSLM feature '" + std::string(f) + "'");
  }
  if (m == "euclidean") {
    s.metric = Metric::euclidean;
  } else if (m == "cosine") {
    s.metric = Metric::cosine;
  } else {
    throw FormatError("unknown SSLM metric '" + std::string(m) + "'");
  }
  return s;
}

Pooling parse_pooling(std::string_view name) {
  if (name == "6pool") return Pooling::pool6;
  if (name == "2pool3") return Pooling::pool2_3;
  throw FormatError("unknown pooling '" + std::string(name) + "' (expected 6pool or 2pool3)");
}

std::vector<InputSpec> RunConfig::inputs() const {
  std::vector<InputSpec> out;
  if (include_mls) out.push_back({});
  for (const auto& s : sslms) out.push_back({false, s});
  return out;
}

void RunConfig::validate() const {
  if (inputs().empty()) throw DomainError("config selects no network input");
  for (std::size_t i = 0; i < sslms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sslms[i] == sslms[j]) throw DomainError("SSLM " + to_string(sslms[i]) + " listed twice");
    }
  }
  if (epochs < 0) throw DomainError("epochs must be >= 0");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must be in [0, 1]");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (!(params.quantile > 0.0 && params.quantile < 1.0)) throw DomainError("quantile must be in (0, 1)");
  if (params.pool < 1 || params.pool1 < 1 || params.pool2 < 1 || params.stack < 0 ||
      params.final_pad < 0) {
    throw DomainError("pooling, stacking and padding settings must be non-negative");
  }
  if (params.pool1 * params.pool2 != params.pool) {
    throw DomainError("pool1 * pool2 must equal pool so both schedules share a frame rate");
  }
}

std::string RunConfig::canonical() const {
  KeyValues kv = feature_keys(*this);
  kv["epochs"] = std::to_string(epochs);
  kv["seed"] = std::to_string(seed);
  kv["split_seed"] = std::to_string(split_seed);
  kv["threshold"] = num(threshold);
  kv["tolerance"] = num(tolerance);
  kv["beta"] = num(beta);
  kv["learning_rate"] = num(learning_rate);
  kv["audio_dir"] = audio_dir.string();
  kv["annotations_dir"] = annotations_dir.string();
  kv["features_dir"] = features_dir.string();
  kv["run_dir"] = run_dir.string();
  return join(kv);
}

std::uint64_t RunConfig::feature_hash() const { return byte_io::fnv1a(join(feature_keys(*this))); }

std::string serialize_config(const RunConfig& config) { return config.canonical(); }

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    auto& p = c.params;
    if (key == "sample_rate") p.sample_rate = parse_number<int>(key, value);
    else if (key == "window") p.window_samples = parse_number<int>(key, value);
    else if (key == "overlap") p.overlap = parse_number<double>(key, value);
    else if (key == "n_mels") p.n_mels = parse_number<int>(key, value);
    else if (key == "fmin_hz") p.fmin_hz = parse_number<double>(key, value);
    else if (key == "fmax_hz") p.fmax_hz = parse_number<double>(key, value);
    else if (key == "lag_seconds") p.lag_seconds = parse_number<double>(key, value);
    else if (key == "pool") p.pool = parse_number<int>(key, value);
    else if (key == "pool1") p.pool1 = parse_number<int>(key, value);
    else if (key == "pool2") p.pool2 = parse_number<int>(key, value);
    else if (key == "stack") p.stack = parse_number<int>(key, value);
    else if (key == "quantile") p.quantile = parse_number<double>(key, value);
    else if (key == "pad_frames") p.final_pad = parse_number<int>(key, value);
    else if (key == "floor_db") p.floor_db = parse_number<double>(key, value);
    else if (key == "inputs") {
      c.include_mls = false;
      c.sslms.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        if (item == "mls") c.include_mls = true;
        else c.sslms.push_back(parse_sslm_selection(item));
      }
    } else if (key == "pooling") c.pooling = parse_pooling(value);
    else if (key == "epochs") c.epochs = parse_number<int>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "split_seed") c.split_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threshold") c.threshold = parse_number<double>(key, value);
    else if (key == "tolerance") c.tolerance = parse_number<double>(key, value);
    else if (key == "beta") c.beta = parse_number<double>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
    else if (key == "include_mls") c.include_mls = parse_bool(key, value);
    else if (key == "audio_dir") c.audio_dir = std::string(value);
    else if (key == "annotations_dir") c.annotations_dir = std::string(value);
    else if (key == "features_dir") c.features_dir = std::string(value);
    else if (key == "run_dir") c.run_dir = std::string(value);
    else throw FormatError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(byte_io::read_file(path));
}

void apply_env_overrides(RunConfig& config) {
  const std::pair<const char*, std::filesystem::path*> vars[] = {
      {"SSLMSEG_AUDIO_DIR", &config.audio_dir},
      {"SSLMSEG_ANNOTATIONS_DIR", &config.annotations_dir},
      {"SSLMSEG_FEATURES_DIR", &config.features_dir},
      {"SSLMSEG_RUN_DIR", &config.run_dir},
  };
  for (const auto& [name, field] : vars) {
    if (const char* v = std::getenv(name); v != nullptr && *v != '\0') *field = v;
  }
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sslmseg
