#include "sslmseg/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "sslmseg/error.hpp"

namespace sslmseg {

MatchResult match_boundaries(const BoundarySet& ref, const BoundarySet& est, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  const std::size_t nr = ref.size();
  const std::size_t ne = est.size();
  std::vector<std::vector<std::size_t>> adj(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      if (std::abs(ref.times[i] - est.times[j]) <= tolerance) adj[i].push_back(j);
    }
  }

  // Kuhn's augmenting-path algorithm.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> est_owner(ne, kNone);
  std::vector<char> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t i) {
    for (std::size_t j : adj[i]) {
      if (seen[j]) continue;
      seen[j] = 1;
      if (est_owner[j] == kNone || augment(est_owner[j])) {
        est_owner[j] = i;
        return true;
      }
    }
    return false;
  };
  MatchResult m;
  for (std::size_t i = 0; i < nr; ++i) {
    seen.assign(ne, 0);
    if (augment(i)) ++m.tp;
  }
  for (std::size_t j = 0; j < ne; ++j) {
    if (est_owner[j] != kNone) m.pairs.emplace_back(ref.times[est_owner[j]], est.times[j]);
  }
  m.fp = ne - m.tp;
  m.fn = nr - m.tp;
  return m;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (!(denom > 0.0)) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn, double beta) {
  Prf r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f = f_beta(r.precision, r.recall, beta);
  return r;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

ScoreReport score_corpus(const std::vector<ScoredPair>& pairs, double tolerance, double beta) {
  if (pairs.empty()) throw DomainError("score_corpus needs at least one track");
  ScoreReport report;
  report.tolerance = tolerance;
  report.beta = beta;
  report.tracks.resize(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& t = report.tracks[i];
    t.id = pairs[i].id;
    t.match = match_boundaries(pairs[i].reference, pairs[i].estimate, tolerance);
    t.score = prf(t.match, beta);
  }
  std::vector<double> p, r, f;
  for (const auto& t : report.tracks) {
    p.push_back(t.score.precision);
    r.push_back(t.score.recall);
    f.push_back(t.score.f);
  }
  report.precision = mean_std(p);
  report.recall = mean_std(r);
  report.f = mean_std(f);
  return report;
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  // Width counts code points so the subscript in the F header lines up.
  std::size_t glyphs = 0;
  for (unsigned char c : s) glyphs += (c & 0xC0U) != 0x80U;
  if (glyphs < width) s.append(width - glyphs, ' ');
  return s;
}

}  // namespace

std::string report_csv(const ScoreReport& report) {
  std::string out = "id,tp,fp,fn,precision,recall,f_beta\n";
  for (const auto& t : report.tracks) {
    out += t.id + "," + std::to_string(t.match.tp) + "," + std::to_string(t.match.fp) + "," +
           std::to_string(t.match.fn) + "," + fmt("%.6f", t.score.precision) + "," +
           fmt("%.6f", t.score.recall) + "," + fmt("%.6f", t.score.f) + "\n";
  }
  out += "mean,,,," + fmt("%.6f", report.precision.mean) + "," + fmt("%.6f", report.recall.mean) +
         "," + fmt("%.6f", report.f.mean) + "\n";
  out += "std,,,," + fmt("%.6f", report.precision.std) + "," + fmt("%.6f", report.recall.std) +
         "," + fmt("%.6f", report.f.std) + "\n";
  return out;
}

std::string report_table(const std::vector<ScoreReport>& reports) {
  const std::size_t w = 16;
  std::string out;
  for (const auto& r : reports) {
    const std::string f_name = r.beta == 1.0 ? "F₁" : "F" + fmt("%.2g", r.beta);
    out += pad_right("Tolerance", w) + pad_right("beta", w) + pad_right("P", w) +
           pad_right("R", w) + f_name + " (std)\n";
    out += pad_right(fmt("±%.1fs", r.tolerance), w) + pad_right(fmt("%.2f", r.beta), w) +
           pad_right(fmt("%.3f", r.precision.mean), w) + pad_right(fmt("%.3f", r.recall.mean), w) +
           fmt("%.3f", r.f.mean) + fmt(" (%.3f)", r.f.std) + "\n";
  }
  return out;
}

}  // namespace sslmseg
