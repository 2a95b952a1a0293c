#include <doctest.h>

#include <cmath>

#include "bgt/level0.hpp"
#include "test_util.hpp"

using namespace bgt;
using namespace bgt::testing;

TEST_CASE("linear_combine") {
  SUBCASE("all weights zero gives uniform") {
    auto out = linear_combine({{1, 0}, {0, 1}}, Level0Weights{{0, 0}});
    CHECK(out.probs == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("a pure feature with weight one is returned as-is") {
    auto out = linear_combine({{1, 0}}, Level0Weights{{1}});
    CHECK(out.probs == std::vector<double>{1, 0});
  }
  SUBCASE("weighted sum with the uniform remainder") {
    auto out = linear_combine({{1, 0}, {0, 1}}, Level0Weights{{0.5, 0.25}});
    CHECK(out.probs[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(out.probs[1] == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("zero total mass falls back to uniform") {
    auto out = linear_combine({{0, 0, 0}}, Level0Weights{{1}});
    CHECK(out.probs == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  }
  SUBCASE("length mismatch throws") {
    CHECK_THROWS_AS(linear_combine({{1, 0}, {0, 1, 0}}, Level0Weights{{0.5, 0.5}}),
                    ValidationError);
    CHECK_THROWS_AS(linear_combine({{1, 0}}, Level0Weights{{0.5, 0.5}}), ValidationError);
  }
  SUBCASE("negative feature values are rejected") {
    CHECK_THROWS_AS(linear_combine({{-1, 0}}, Level0Weights{{1}}), ValidationError);
  }
  SUBCASE("scaling all features by c > 0 is irrelevant when w0 = 0") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const double c = rng.uniform(0.1, 20.0);
      std::vector<FeatureVector> f = {{rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5)},
                                      {rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5)}};
      std::vector<FeatureVector> scaled = f;
      for (auto& v : scaled)
        for (double& x : v) x *= c;
      Level0Weights w{{0.6, 0.4}};  // w0 = 0
      auto a = linear_combine(f, w);
      auto b = linear_combine(scaled, w);
      for (size_t i = 0; i < 3; ++i)
        CHECK(a.probs[i] == doctest::Approx(b.probs[i]).epsilon(1e-12));
    }
  }
  SUBCASE("binary features with w0 > 0 keep full support") {
    Level0Weights w{{0.3, 0.5}};  // w0 = 0.2
    auto out = linear_combine({{1, 0, 0}, {0, 1, 0}}, w);
    for (double p : out.probs) CHECK(p > 0.0);
    out.validate();
  }
}

TEST_CASE("logit_combine") {
  SUBCASE("all weights zero gives uniform") {
    auto out = logit_combine({{5, 1}, {2, 9}}, Level0Weights{{0, 0}});
    CHECK(out.probs == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("softmax of ln 3 splits 3:1") {
    auto out = logit_combine({{std::log(3.0), 0}}, Level0Weights{{1}});
    CHECK(out.probs[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(out.probs[1] == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("output does not depend on w0") {
    // w0 varies with the feature weights held fixed by padding with a zero feature
    std::vector<FeatureVector> f = {{2, 7, 1}, {0, 0, 0}};
    auto a = logit_combine(f, Level0Weights{{0.4, 0.0}});   // w0 = 0.6
    auto b = logit_combine(f, Level0Weights{{0.4, 0.6}});   // w0 = 0
    for (size_t i = 0; i < 3; ++i)
      CHECK(a.probs[i] == doctest::Approx(b.probs[i]).epsilon(1e-12));
  }
  SUBCASE("handles large values without overflow") {
    auto out = logit_combine({{1000, 0}}, Level0Weights{{1}});
    CHECK(out.probs[0] == doctest::Approx(1.0));
    out.validate();
  }
}

TEST_CASE("predict_level0") {
  SUBCASE("uniform spec is uniform") {
    NormalFormGame g = make_game("u", {{1, 2, 3}}, {{4, 5, 6}});
    auto out = predict_level0(uniform_spec(), g, Role::kCol);
    CHECK(out.probs == std::vector<double>(3, 1.0 / 3));
  }
  SUBCASE("linear4 with zero weights is uniform") {
    auto out = predict_level0(linear4_spec(), prisoners_dilemma(), Role::kRow);
    CHECK(out.probs == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("fairness-only weights on the PD reduce to uniform") {
    Level0Spec spec = linear4_spec();
    spec.weights.w = {0, 0, 0.5, 0};
    auto out = predict_level0(spec, prisoners_dilemma(), Role::kRow);
    CHECK(out.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("outputs are valid distributions on random games and weights") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
      NormalFormGame g = random_game(rng, 2 + trial % 3, 2 + trial % 2, -10, 50, true);
      Level0Spec spec = trial % 2 ? linear8_spec() : linear4_spec();
      double remaining = 1.0;
      for (double& w : spec.weights.w) {
        w = remaining * rng.uniform(0, 0.4);
        remaining -= w;
      }
      for (Role p : {Role::kRow, Role::kCol}) predict_level0(spec, g, p).validate();
    }
  }
}

TEST_CASE("named specs have the documented shapes") {
  Level0Spec l4 = linear4_spec();
  CHECK(l4.kinds == std::vector<FeatureKind>{FeatureKind::kMaxmaxBinary,
                                             FeatureKind::kMaxminBinary, FeatureKind::kFairBinary,
                                             FeatureKind::kMaxSymmetricBinary});
  CHECK(l4.combiner == CombinerForm::kLinear);
  CHECK(l4.transforms.informativeness);
  CHECK(l4.transforms.normalized_activation);

  Level0Spec l8 = linear8_spec();
  REQUIRE(l8.kinds.size() == 8);
  CHECK(l8.kinds[4] == FeatureKind::kMaxReal);
  CHECK(l8.kinds[5] == FeatureKind::kMinReal);
  CHECK(l8.kinds[6] == FeatureKind::kUnfairReal);
  CHECK(l8.kinds[7] == FeatureKind::kSymmetricReal);
  CHECK(uniform_spec().kinds.empty());
}

TEST_CASE("weights validation") {
  Level0Weights over{{0.5, 0.6}};
  CHECK_THROWS_AS(over.validate(), ValidationError);
  Level0Weights negative{{-0.1}};
  CHECK_THROWS_AS(negative.validate(), ValidationError);
  Level0Weights half{{0.25, 0.25}};
  CHECK(half.w0() == doctest::Approx(0.5));
}

TEST_CASE("spec json serialization round-trips") {
  Level0Spec spec = linear8_spec();
  spec.weights.w = {0.1, 0.05, 0.2, 0.1, 0.02, 0.03, 0.04, 0.05};
  Level0Spec back = level0_spec_from_json(level0_spec_to_json(spec));
  CHECK(back.name == spec.name);
  CHECK(back.kinds == spec.kinds);
  CHECK(back.combiner == spec.combiner);
  CHECK(back.transforms.informativeness == spec.transforms.informativeness);
  CHECK(back.weights.w == spec.weights.w);
  CHECK_THROWS_AS(level0_spec_from_json("{\"kinds\": [\"nope\"]}"), ValidationError);
}
