#include "sslmseg/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sslmseg/byte_io.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/random.hpp"

namespace sslmseg {

namespace {

constexpr double kDuplicateTolerance = 1e-9;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    ++line_no;
    if (!line.empty()) fn(line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

double parse_time(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse time '" +
                      std::string(token) + "'");
  }
  return value;
}

std::string format_time(double t) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), t);
  return std::string(buf, ptr);
}

}  // namespace

BoundarySet BoundarySet::from_unsorted(std::vector<double> times) {
  std::sort(times.begin(), times.end());
  BoundarySet out;
  for (double t : times) {
    if (out.times.empty() || t - out.times.back() > kDuplicateTolerance) out.times.push_back(t);
  }
  return out;
}

bool BoundarySet::is_canonical() const {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] - times[i - 1] > kDuplicateTolerance)) return false;
  }
  return true;
}

BoundarySet parse_functions_text(std::string_view text) {
  std::vector<double> times;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto sep = line.find_first_of(" \t");
    times.push_back(parse_time(line.substr(0, sep), line_no));
  });
  auto b = BoundarySet::from_unsorted(std::move(times));
  if (!b.times.empty()) b.times.erase(b.times.begin());
  return b;
}

BoundarySet parse_functions_file(const std::filesystem::path& path) {
  return parse_functions_text(byte_io::read_file(path));
}

std::string serialize_functions(const BoundarySet& b) {
  std::string out = "0.0\tSilence\n";
  for (std::size_t i = 0; i < b.times.size(); ++i) {
    if (!(b.times[i] > kDuplicateTolerance)) {
      throw DomainError("boundary times must be positive to serialize after the start tag");
    }
    out += format_time(b.times[i]);
    out += "\tsection_";
    out += std::to_string(i + 1);
    out += '\n';
  }
  return out;
}

BoundarySet parse_boundary_list(std::string_view text) {
  std::vector<double> times;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    times.push_back(parse_time(line, line_no));
  });
  return BoundarySet::from_unsorted(std::move(times));
}

std::string serialize_boundary_list(const BoundarySet& b) {
  std::string out;
  for (double t : b.times) {
    out += format_time(t);
    out += '\n';
  }
  return out;
}

TargetCurve to_target_curve(const BoundarySet& b, std::size_t n_frames, double frame_rate,
                            int pad) {
  if (!(frame_rate > 0.0)) throw DomainError("frame rate must be positive");
  if (pad < 0) throw DomainError("padding must be non-negative");
  TargetCurve curve;
  curve.frame_rate = frame_rate;
  curve.pad_frames = pad;
  curve.values.assign(n_frames, 0.0);

  // The printed label-to-frame formula mixes units; boundaries are mapped to
  // final-pooled frames and shifted by the leading input padding instead:
  //   mu_i = label_i / (p1 p2) + h sr / gamma   (as printed)
  //   mu_i = round(label_i * frame_rate) + gamma   (as implemented)
  const auto content_end = static_cast<long long>(n_frames) - pad;
  const double sigma = kTargetSigmaSeconds * frame_rate;
  for (double t : b.times) {
    const long long mu = std::llround(t * frame_rate) + pad;
    if (t < 0.0 || mu >= content_end) {
      curve.dropped.push_back(t);
      continue;
    }
    for (std::size_t f = 0; f < n_frames; ++f) {
      const double z = (static_cast<double>(f) - static_cast<double>(mu)) / sigma;
      const double g = std::exp(-0.5 * z * z);
      if (g > curve.values[f]) curve.values[f] = g;
    }
  }
  return curve;
}

DatasetSplit split_dataset(std::vector<std::string> track_ids, std::uint64_t seed) {
  const std::size_t n = track_ids.size();
  if (n < 3) throw DomainError("a dataset split needs at least 3 tracks");
  std::sort(track_ids.begin(), track_ids.end());
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(i)));
    std::swap(track_ids[i], track_ids[j]);
  }
  const std::size_t n_train = std::max<std::size_t>(1, n * 65 / 100);
  const std::size_t n_val = std::max<std::size_t>(1, n * 15 / 100);

  DatasetSplit split;
  const auto begin = track_ids.begin();
  split.train.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                          begin + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_val), track_ids.end());
  return split;
}

std::string serialize_manifest(const DatasetSplit& split) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& ids, const char* tag) {
    for (const auto& id : ids) {
      out += id;
      out += '\t';
      out += tag;
      out += '\n';
    }
  };
  emit(split.train, "train");
  emit(split.validation, "val");
  emit(split.test, "test");
  return out;
}

DatasetSplit parse_manifest(std::string_view text) {
  DatasetSplit split;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 'id<TAB>split'");
    }
    const std::string id(line.substr(0, sep));
    const auto tag = trim(line.substr(sep + 1));
    if (tag == "train") {
      split.train.push_back(id);
    } else if (tag == "val" || tag == "validation") {
      split.validation.push_back(id);
    } else if (tag == "test") {
      split.test.push_back(id);
    } else {
      throw FormatError("manifest line " + std::to_string(line_no) + ": unknown split '" +
                        std::string(tag) + "'");
    }
  });
  return split;
}

}  // namespace sslmseg
