#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "aninorm/errors.hpp"
#include "aninorm/lti.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aninorm;
using fixtures::mat;

TEST(StateSpaceModel, ValidatesDimensions) {
  EXPECT_THROW(StateSpaceModel(mat({{1, 0}}), mat({{1}}), mat({{1}}), mat({{0}})), DimensionError);
  EXPECT_THROW(StateSpaceModel(mat({{0.5}}), mat({{1}, {1}}), mat({{1}}), mat({{0}})), DimensionError);
  EXPECT_THROW(StateSpaceModel(mat({{0.5}}), mat({{1}}), mat({{1, 1}}), mat({{0}})), DimensionError);
  EXPECT_THROW(StateSpaceModel(mat({{0.5}}), mat({{1}}), mat({{1}}), mat({{0, 0}})), DimensionError);
  EXPECT_THROW(StateSpaceModel(mat({{NAN}}), mat({{1}}), mat({{1}}), mat({{0}})), NonFiniteInput);
}

TEST(StateSpaceModel, StaticGain) {
  const auto F = StateSpaceModel::static_gain(mat({{1, 2, 3}, {4, 5, 6}}));
  EXPECT_EQ(F.states(), 0);
  EXPECT_EQ(F.inputs(), 3);
  EXPECT_EQ(F.outputs(), 2);
  EXPECT_TRUE(is_stable(F));
}

TEST(ShapingFilter, RequiresSquareStable) {
  EXPECT_THROW(ShapingFilter(StateSpaceModel::static_gain(mat({{1, 0}}))), NotSquare);
  EXPECT_THROW(ShapingFilter(StateSpaceModel(mat({{1.0}}), mat({{1}}), mat({{1}}), mat({{1}}))),
               StabilityError);
  EXPECT_NO_THROW(ShapingFilter(fixtures::one_pole(0.5)));
}

TEST(FreqResponse, ScalarLag) {
  const auto F = fixtures::scalar_lag();
  EXPECT_NEAR(std::abs(freq_response(F, 0.0)(0, 0)), 2.0, 1e-15);
  EXPECT_NEAR(std::abs(freq_response(F, M_PI)(0, 0)), 2.0 / 3.0, 1e-15);
}

TEST(FreqResponse, SingularOnUnitCircle) {
  const StateSpaceModel F(mat({{1.0}}), mat({{1}}), mat({{1}}), mat({{0}}));
  EXPECT_THROW(freq_response(F, 0.0), SingularResolvent);
}

TEST(Cascade, ResponseIsProduct) {
  const auto F = random_stable(3, 2, 2, 5, 0.9);
  const auto G = random_stable(2, 2, 2, 6, 0.8);
  const auto FG = cascade(F, G);
  EXPECT_EQ(FG.states(), 5);
  for (double w : {0.0, 0.4, 1.7, 3.1}) {
    const ComplexMatrix expected = oracle::response(F, w) * oracle::response(G, w);
    EXPECT_LE((freq_response(FG, w) - expected).norm(), 1e-12);
  }
  EXPECT_THROW(cascade(random_stable(1, 3, 1, 1, 0.5), G), DimensionError);
}

TEST(RandomStable, DeterministicAndStable) {
  const auto F1 = random_stable(4, 3, 2, 42, 0.95);
  const auto F2 = random_stable(4, 3, 2, 42, 0.95);
  const auto F3 = random_stable(4, 3, 2, 43, 0.95);
  EXPECT_TRUE(F1 == F2);
  EXPECT_FALSE(F1 == F3);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto F = random_stable(1 + seed % 6, 2, 2, seed, 0.95);
    EXPECT_LT(spectral_radius(F.A()), 0.95);
  }
  EXPECT_THROW(random_stable(0, 1, 1, 1, 0.9), DimensionError);
  EXPECT_THROW(random_stable(1, 1, 1, 1, 1.5), std::invalid_argument);
}

TEST(ModelJson, RoundTrip) {
  const auto F = random_stable(3, 2, 2, 9, 0.9);
  EXPECT_TRUE(model_from_json(model_to_json(F)) == F);
  const auto path = std::filesystem::temp_directory_path() / "aninorm_lti_roundtrip.json";
  save_model(F, path);
  EXPECT_TRUE(load_model(path) == F);
  std::filesystem::remove(path);
}

TEST(ModelJson, StaticModelWithEmptyBlocks) {
  const auto j = nlohmann::json::parse(R"({"A": [], "B": [], "C": [], "D": [[1, 0], [0, 0]]})");
  const auto F = model_from_json(j);
  EXPECT_EQ(F.states(), 0);
  EXPECT_EQ(F.inputs(), 2);
  EXPECT_EQ(F.outputs(), 2);
}

TEST(ModelJson, SchemaErrors) {
  using nlohmann::json;
  EXPECT_THROW(model_from_json(json::parse(R"({"A": [[1]], "B": [[1]], "C": [[1]]})")), SchemaError);
  EXPECT_THROW(model_from_json(json::parse(R"({"A": [[1]], "B": [[1]], "C": [[1]], "D": [[0]], "E": 1})")),
               SchemaError);
  EXPECT_THROW(model_from_json(json::parse(R"({"A": [[1, 2], [3]], "B": [[1]], "C": [[1]], "D": [[0]]})")),
               DimensionError);
  EXPECT_THROW(model_from_json(json::parse(R"({"A": [["x"]], "B": [[1]], "C": [[1]], "D": [[0]]})")),
               SchemaError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), SchemaError);
}
