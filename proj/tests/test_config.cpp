#include <gtest/gtest.h>

#include <filesystem>

#include "test_util.hpp"

using namespace modfix;
using modfix::testing::Q;

namespace {

const char* kMinimal = R"({
  "space": {"dimension": 1},
  "modular": {"family": "abs-norm"},
  "map": {"affine": {"slope": "1/3", "offset": "0"}},
  "graph": {"kind": "complete"}
})";

std::string error_path(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string with(const std::string& key_value) {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), ", " + key_value);
  return s;
}

}  // namespace

TEST(Config, MinimalDefaults) {
  auto cfg = parse_config_text(kMinimal);
  EXPECT_EQ(cfg.space.dimension, 1u);
  EXPECT_EQ(cfg.space.backend, Backend::exact);
  ASSERT_TRUE(cfg.modular.builtin);
  EXPECT_EQ(cfg.modular.builtin->family, ModularFamily::abs_norm);
  EXPECT_EQ(cfg.map.kind, MapConfig::Kind::affine);
  EXPECT_EQ(cfg.map.slope, Q("1/3"));
  EXPECT_EQ(cfg.map.offset, (RationalPoint{0}));
  EXPECT_FALSE(cfg.contraction);
  EXPECT_FALSE(cfg.solve);
}

TEST(Config, ConstantsSurviveExactly) {
  auto cfg = parse_config_text(with(R"("contraction": {"kannan": {"k": "64/81", "l": 0.1, "a1": "1/2", "a2": 1, "b": "1"}})"));
  ASSERT_TRUE(cfg.contraction);
  EXPECT_EQ(cfg.contraction->mode, ContractionMode::kannan);
  EXPECT_EQ(cfg.contraction->values, (std::vector<Rational>{Q("64/81"), Q("1/10"), Q("1/2"), 1, 1}));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(error_path(with(R"("colour": 1)")), "$.colour");
  EXPECT_EQ(error_path(R"({"space": {"dimension": 0}, "modular": {"family": "abs-norm"}, "map": {"expression": "x"}, "graph": {"kind": "complete"}})"),
            "$.space.dimension");
  EXPECT_EQ(error_path(with(R"("contraction": {"banach": {"k": "3/2", "a": "1/2", "b": "1"}})")), "$.contraction.banach");
  EXPECT_EQ(error_path(with(R"("contraction": {"banach": {"k": "1/2", "a": "x", "b": "1"}})")), "$.contraction.banach.a");
  EXPECT_EQ(error_path(with(R"("solve": {"x0": ["1", "2"], "tol": "1e-9"})")), "$.solve.x0");
  EXPECT_EQ(error_path(with(R"("solve": {"x0": ["1"], "tol": "0"})")), "$.solve.tol");
  EXPECT_EQ(error_path(with(R"("samples": {"random": {"lo": "0", "hi": "1", "count": 3}})")), "$.samples.random.seed");
  EXPECT_EQ(error_path(R"({"space": {"dimension": 1}, "modular": {"family": "power", "p": "2"}, "map": {"expression": "x +"}, "graph": {"kind": "complete"}})"),
            "$.map.expression");
  EXPECT_EQ(error_path(R"({"space": {"dimension": 1}, "modular": {"family": "power", "p": "2"},
      "map": {"piecewise": [{"guard": "else", "value": "1"}, {"guard": "x = 1", "value": "0"}]}, "graph": {"kind": "complete"}})"),
            "$.map.piecewise[0].guard");
  EXPECT_EQ(error_path("{"), "$");
}

TEST(Config, ErrorMessageContainsPath) {
  try {
    parse_config_text(with(R"("graph2": 1)"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("graph2"), std::string::npos);
  }
}

TEST(Config, RoundTripIsIdempotent) {
  for (const auto& entry : std::filesystem::directory_iterator(MODFIX_CONFIG_DIR)) {
    auto cfg = load_config(entry.path().string());
    const json once = to_json(cfg);
    const json twice = to_json(parse_config(once));
    EXPECT_EQ(once.dump(), twice.dump()) << entry.path();
    EXPECT_EQ(to_json(parse_config(twice)).dump(), twice.dump());
  }
}

TEST(Config, LoadMissingFile) {
  EXPECT_THROW(load_config("/nonexistent/modfix.json"), ConfigError);
}

TEST(Config, ExpressionsAndGraphs) {
  auto cfg = parse_config_text(R"({
    "space": {"dimension": 2, "backend": "float"},
    "modular": {"expression": "x1^2 + x2^2", "convex": true},
    "map": {"expressions": ["x1/2", "x2/3"]},
    "graph": {"kind": "custom", "edge": "x1 <= y1"},
    "samples": {"coeffs": [["1/4", "3/4"]]}
  })");
  EXPECT_EQ(cfg.space.backend, Backend::floating);
  EXPECT_EQ(cfg.modular.expression, "x1^2 + x2^2");
  EXPECT_EQ(cfg.map.expressions.size(), 2u);
  EXPECT_EQ(cfg.graph.kind, GraphKind::custom);
  EXPECT_EQ(cfg.graph.predicate, "x1 <= y1");
  ASSERT_EQ(cfg.samples.coeffs.size(), 1u);
  EXPECT_EQ(cfg.samples.coeffs[0].second, Q("3/4"));
}
