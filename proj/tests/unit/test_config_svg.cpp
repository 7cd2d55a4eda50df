#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "scram_xai/scram_xai.hpp"

using namespace scram_xai;

TEST(Config, ParsesKeyValuesWithComments) {
  const auto kv = parse_key_values({"# header", "", "metric = mse  # trailing", "epochs=3",
                                    "epochs = 4"});
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("metric"), "mse");
  EXPECT_EQ(kv.at("epochs"), "4");
  EXPECT_THROW(parse_key_values({"metric mse"}), ValidationError);
  EXPECT_THROW(parse_key_values({" = 3"}), ValidationError);
}

TEST(Config, AppliesKnownKeys) {
  const auto cfg = apply_config({}, {{"cycles", "5"},
                                     {"cycle_split", "3/1/1"},
                                     {"desk_scale", "true"},
                                     {"window", "12"},
                                     {"learning_rate", "0.01"},
                                     {"metric", "mse"},
                                     {"threshold", "0.2"},
                                     {"period", "15"}});
  EXPECT_EQ(cfg.corpus.cycles, 5u);
  EXPECT_EQ(cfg.cycle_split, (std::vector<double>{3, 1, 1}));
  EXPECT_EQ(cfg.architecture().window, 12u);
  EXPECT_EQ(cfg.architecture().bottleneck, AeArchitecture::desk_scale().bottleneck);
  EXPECT_EQ(cfg.train.learning_rate, 0.01);
  EXPECT_EQ(cfg.finetune.learning_rate, 0.01);
  EXPECT_EQ(cfg.metric, Metric::Mse);
  EXPECT_EQ(cfg.threshold, std::optional<double>(0.2));
  EXPECT_EQ(cfg.benchmark().scenario.period, 15u);
  EXPECT_EQ(cfg.benchmark().arch.window, 12u);
}

TEST(Config, DefaultsMatchTheFullArchitecture) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.architecture(), AeArchitecture{});
  EXPECT_EQ(cfg.quantile, 0.97);
  EXPECT_EQ(cfg.min_run, 5u);
  EXPECT_EQ(cfg.train.batch_size, 32u);
  EXPECT_FALSE(cfg.threshold.has_value());
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(apply_config({}, {{"colour", "red"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"epochs", "ten"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"epochs", "2.5"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"epochs", "-1"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"desk_scale", "maybe"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"metric", "rmse"}}), ValidationError);
  EXPECT_THROW(apply_config({}, {{"cycle_split", "3/x"}}), ValidationError);
}

TEST(Config, LoadsFromFile) {
  const auto path = (std::filesystem::temp_directory_path() / "scram_xai.conf").string();
  csv::write_text(path, "# run\nout_dir = /tmp/elsewhere\nmin_run = 7\n");
  const auto cfg = load_config(path);
  EXPECT_EQ(cfg.out_dir, "/tmp/elsewhere");
  EXPECT_EQ(cfg.min_run, 7u);
  std::filesystem::remove(path);
}

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Svg, TimelineShadesScoredRuns) {
  const Matrix scaled = Matrix::Constant(8, 9, 0.5);
  const auto tl =
      make_timeline({NAN, NAN, 0.1, 0.1, 0.3, 0.3, 0.1, 0.3}, 3, 0.2, Metric::Mae);
  const auto svg = svg::render_timeline(scaled, tl);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(occurrences(svg, "<polyline"), 9u);
  EXPECT_EQ(occurrences(svg, "#b8e0b8"), 2u);
  EXPECT_EQ(occurrences(svg, "#f4a6a6"), 2u);
  EXPECT_EQ(occurrences(svg, "<text"), 9u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_THROW(svg::render_timeline(Matrix::Zero(7, 9), tl), ValidationError);
}

TEST(Svg, AttributionBreaksAtUncoveredSeconds) {
  PerSecondAttribution ps;
  ps.phi = Matrix::Zero(10, 9);
  ps.count = {0, 1, 1, 1, 0, 0, 1, 1, 0, 0};
  const auto svg = svg::render_attribution(ps, 0.1);
  EXPECT_EQ(occurrences(svg, "<polyline"), 18u);
  EXPECT_EQ(occurrences(svg, "stroke-dasharray"), 1u);
}
