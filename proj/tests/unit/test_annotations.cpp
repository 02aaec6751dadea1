#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "sslmseg/annotations.hpp"
#include "sslmseg/error.hpp"
#include "sslmseg/params.hpp"

using namespace sslmseg;

TEST_SUITE("annotations") {
  TEST_CASE("functions files") {
    CHECK(parse_functions_text("0.0\tSilence\n12.5\tVerse\n40.2\tChorus\n").times == std::vector<double>{12.5, 40.2});
    CHECK(parse_functions_text("3.0\tIntro\n").empty());
    CHECK(parse_functions_text("40.2\tChorus\n0.0\tSilence\n12.5\tVerse\n").times ==
          std::vector<double>{12.5, 40.2});
    CHECK_THROWS_WITH_AS(parse_functions_text("0.0\tSilence\nabc\tVerse\n"), doctest::Contains("line 2"),
                         FormatError);
    const auto b = BoundarySet::from_unsorted({30.0, 7.25, 18.0});
    CHECK(parse_functions_text(serialize_functions(b)) == b);
    CHECK(parse_boundary_list(serialize_boundary_list(b)) == b);
  }

  TEST_CASE("target curves") {
    const double fr = PipelineParams{}.final_frame_rate();
    const auto empty = to_target_curve({}, 200, fr, 50);
    CHECK(empty.values.size() == 200);
    for (double v : empty.values) CHECK(v == 0.0);

    const auto one = to_target_curve(BoundarySet::from_unsorted({40.0 / fr}), 200, fr, 50);
    CHECK(one.values[90] == doctest::Approx(1.0));
    CHECK(*std::max_element(one.values.begin(), one.values.end()) == one.values[90]);

    const double t1 = 10.0, t2 = 10.05;
    const auto two = to_target_curve(BoundarySet::from_unsorted({t1, t2}), 200, fr, 50);
    const double sigma = 0.1 * fr;
    for (std::size_t f = 0; f < 200; ++f) {
      double want = 0.0;
      for (double t : {t1, t2}) {
        const double mu = std::round(t * fr) + 50;
        want = std::max(want, std::exp(-0.5 * std::pow((static_cast<double>(f) - mu) / sigma, 2)));
      }
      CHECK(two.values[f] == doctest::Approx(want).epsilon(1e-12));
    }

    const auto late = to_target_curve(BoundarySet::from_unsorted({5.0, 1000.0}), 200, fr, 50);
    CHECK(late.dropped == std::vector<double>{1000.0});
  }

  TEST_CASE("dataset split") {
    auto ids = [](int n) {
      std::vector<std::string> v;
      for (int i = 0; i < n; ++i) v.push_back("t" + std::to_string(i));
      return v;
    };
    const auto big = split_dataset(ids(1006), 5);
    CHECK(big.train.size() == 653);
    CHECK(big.validation.size() == 150);
    CHECK(big.test.size() == 203);
    std::set<std::string> all(big.train.begin(), big.train.end());
    all.insert(big.validation.begin(), big.validation.end());
    all.insert(big.test.begin(), big.test.end());
    CHECK(all.size() == 1006);

    const auto small = split_dataset(ids(3), 5);
    CHECK(small.train.size() == 1);
    CHECK(small.validation.size() == 1);
    CHECK(small.test.size() == 1);
    CHECK_THROWS_AS(split_dataset(ids(2), 5), DomainError);

    const auto again = split_dataset(ids(1006), 5);
    CHECK(again.train == big.train);
    CHECK(again.test == big.test);
    const auto back = parse_manifest(serialize_manifest(big));
    CHECK(back.train == big.train);
    CHECK(back.validation == big.validation);
    CHECK(back.test == big.test);
  }
}
