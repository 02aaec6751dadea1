#include "doctest.h"
#include "oracles.hpp"
#include "sslmseg/annotations.hpp"
#include "sslmseg/evaluation.hpp"
#include "sslmseg/params.hpp"
#include "sslmseg/postprocess.hpp"
#include "sslmseg/random.hpp"
#include "sslmseg/svg_plot.hpp"

using namespace sslmseg;

namespace {

BoundarySet bs(std::vector<double> t) { return BoundarySet::from_unsorted(std::move(t)); }

PredictionCurve curve(std::size_t n) {
  PredictionCurve c;
  c.probs.assign(n, 0.0);
  c.frame_rate = PipelineParams{}.final_frame_rate();
  c.pad_frames = 50;
  return c;
}

}  // namespace

TEST_SUITE("postprocess") {
  TEST_CASE("peak picking") {
    CHECK(pick_peaks(curve(300), 0.0).empty());

    auto c = curve(200);
    c.probs[60] = 0.4;
    c.probs[70] = 0.3;
    const auto p = pick_peaks(c, 0.2);
    REQUIRE(p.size() == 1);
    CHECK(p.times[0] == doctest::Approx(10.0 / 7.177734375));
    CHECK(p.times[0] == doctest::Approx(1.393).epsilon(1e-3));

    c.probs[150] = 0.35;
    CHECK(pick_peak_frames(c, 0.2) == std::vector<std::size_t>{60, 150});

    auto all = curve(100);
    for (std::size_t i = 0; i < 100; ++i) all.probs[i] = 0.5 + 0.4 * std::sin(static_cast<double>(i));
    CHECK(pick_peaks(all, 1.0).empty());

    auto flat = curve(120);
    for (std::size_t i = 80; i < 85; ++i) flat.probs[i] = 0.6;
    CHECK(pick_peak_frames(flat, 0.5) == std::vector<std::size_t>{80});

    auto early = curve(120);
    early.probs[20] = 0.9;
    CHECK(pick_peaks(early, 0.5).empty());
  }

  TEST_CASE("threshold sweep") {
    const double fr = PipelineParams{}.final_frame_rate();
    std::vector<CurveWithReference> exact, rippled;
    for (int t = 0; t < 3; ++t) {
      const auto ref = bs({10.0 + t, 25.0, 40.0 - t});
      const auto target = to_target_curve(ref, 450, fr, 50);
      exact.push_back({PredictionCurve{target.values, fr, 50}, ref});
      // A network never outputs exact zeros: add a low ripple under the peaks.
      auto probs = target.values;
      for (std::size_t f = 0; f < probs.size(); ++f) {
        probs[f] = std::max(probs[f], 0.02 + 0.01 * std::sin(0.9 * static_cast<double>(f + t)));
      }
      rippled.push_back({PredictionCurve{probs, fr, 50}, ref});
    }
    CHECK(sweep_threshold(exact, 0.5, 1.0).best_f == 1.0);
    const auto s = sweep_threshold(rippled, 0.5, 1.0);
    CHECK(s.table.size() == 201);
    CHECK(s.best_f == 1.0);
    CHECK(s.best_threshold > 0.0);
    CHECK(s.best_threshold < 1.0);
    CHECK(s.table[0].f_beta < 1.0);
    CHECK(s.table[0].threshold == 0.0);
    CHECK(s.table[200].threshold == 1.0);

    const auto back = parse_sweep_csv(sweep_csv(s));
    CHECK(back.table.size() == 201);
    CHECK(back.best_threshold == doctest::Approx(s.best_threshold));
    const auto svg = sweep_svg(s, "sweep");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
  }
}

TEST_SUITE("evaluation") {
  TEST_CASE("matching") {
    const auto same = match_boundaries(bs({1, 5, 9}), bs({1, 5, 9}), 0.5);
    CHECK(same.tp == 3);
    CHECK(same.fp + same.fn == 0);
    const auto m = match_boundaries(bs({1.0, 5.0}), bs({1.2, 7.0}), 0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(match_boundaries(bs({1.0, 1.4}), bs({1.2, 1.9}), 0.5).tp == 2);
    CHECK(match_boundaries(bs({1.0, 1.4}), bs({1.3, 1.9}), 0.5).tp == 2);
    CHECK(oracle::greedy_matches(bs({1.0, 1.4}), bs({1.3, 1.9}), 0.5) == 1);
    CHECK(match_boundaries(bs({2.0}), bs({2.5}), 0.5).tp == 1);

    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> r, e;
      for (auto n = rng.uniform_int(0, 5); n > 0; --n) r.push_back(rng.uniform(0.0, 4.0));
      for (auto n = rng.uniform_int(0, 5); n > 0; --n) e.push_back(rng.uniform(0.0, 4.0));
      CHECK(match_boundaries(bs(r), bs(e), 0.5).tp == oracle::exhaustive_matches(bs(r), bs(e), 0.5));
    }
  }

  TEST_CASE("precision, recall, F") {
    const auto h = prf(1, 1, 1, 1.0);
    CHECK(h.precision == 0.5);
    CHECK(h.recall == 0.5);
    CHECK(h.f == 0.5);
    const auto z = prf(0, 4, 2, 1.0);
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f == 0.0);
    CHECK(prf(0, 0, 0, 1.0).f == 0.0);
    CHECK(f_beta(0.501, 0.359, 1.0) == doctest::Approx(0.4182767441860465));
    CHECK(f_beta(0.42, 0.42, 0.58) == doctest::Approx(0.42));
  }

  TEST_CASE("corpus summary") {
    const auto one = score_corpus({{"a", bs({3.0}), bs({3.1})}}, 0.5, 1.0);
    CHECK(one.f.mean == 1.0);
    CHECK(one.f.std == 0.0);
    const auto two = score_corpus({{"a", bs({3.0}), bs({3.1})}, {"b", bs({3.0}), bs({9.0})}}, 0.5, 1.0);
    CHECK(two.f.mean == 0.5);
    CHECK(two.f.std == 0.5);
    const auto csv = report_csv(two);
    CHECK(csv.rfind("id,tp,fp,fn,precision,recall,f_beta", 0) == 0);
    CHECK(csv.find("\nmean,") != std::string::npos);
    CHECK(report_table({one, two}).find("F") != std::string::npos);
  }
}
