#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sslmseg/boundary_set.hpp"

namespace sslmseg {

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<double, double>> pairs;  // (reference, estimate)
};

/// Maximum-cardinality matching of reference and estimated boundaries whose
/// distance is at most `tolerance` seconds.
MatchResult match_boundaries(const BoundarySet& ref, const BoundarySet& est, double tolerance);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn, double beta);
inline Prf prf(const MatchResult& m, double beta) { return prf(m.tp, m.fp, m.fn, beta); }
/// F_beta of given precision and recall; 0 when both vanish.
double f_beta(double precision, double recall, double beta);

struct TrackScore {
  std::string id;
  MatchResult match;
  Prf score;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct ScoreReport {
  double tolerance = 0.5;
  double beta = 1.0;
  std::vector<TrackScore> tracks;
  MeanStd precision;
  MeanStd recall;
  MeanStd f;
};

struct ScoredPair {
  std::string id;
  BoundarySet reference;
  BoundarySet estimate;
};

/// Per-track scores, then mean and population std across tracks.
ScoreReport score_corpus(const std::vector<ScoredPair>& pairs, double tolerance, double beta);

MeanStd mean_std(const std::vector<double>& values);

/// "id,tp,fp,fn,precision,recall,f_beta" rows followed by mean and std rows.
std::string report_csv(const ScoreReport& report);
/// Aligned text table with P, R and "F (std)" columns.
std::string report_table(const std::vector<ScoreReport>& reports);

}  // namespace sslmseg
