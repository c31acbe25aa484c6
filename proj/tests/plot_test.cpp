#include <gtest/gtest.h>

#include <filesystem>
#include <regex>

#include "pdm/plot.hpp"

using namespace pdm;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "pdm_plot_test";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST(Plot, SingleSeriesHasOnePolyline) {
  PlotSpec spec{"t", "x", "y", {{"s", {1, 2, 3}, {4, 5, 6}, {}, ""}}};
  const auto svg = render_svg(spec);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_EQ(count(svg, "<polygon"), 0u);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("class=\"axis\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"legend\""), std::string::npos);
}

TEST(Plot, MeanAndStdGivesBandAndLine) {
  PlotSpec spec{"t", "x", "y", {{"s", {1, 2, 3}, {4, 5, 6}, {0.5, 0.5, 1.0}, ""}}};
  const auto svg = render_svg(spec);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_EQ(count(svg, "<polygon class=\"band\""), 1u);
}

TEST(Plot, BandEnclosesLine) {
  // Band vertices above and below every line vertex (SVG y grows downward).
  PlotSpec spec{"t", "x", "y", {{"s", {0, 1, 2, 3}, {1, 3, 2, 5}, {1, 1, 0.5, 2}, ""}}};
  const auto svg = render_svg(spec);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("<polygon class=\"band\" points=\"([^\"]+)\"")));
  std::vector<double> ys;
  std::istringstream in(m[1].str());
  std::string pt;
  while (in >> pt) ys.push_back(std::stod(pt.substr(pt.find(',') + 1)));
  ASSERT_EQ(ys.size(), 8u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(ys[i], ys[7 - i]);
}

TEST(Plot, ManySeries) {
  PlotSpec spec{"t", "x", "y", {}};
  for (int k = 0; k < 5; ++k) spec.series.push_back({"s" + std::to_string(k), {1, 2}, {double(k), k + 1.0}, {}, ""});
  spec.references.push_back({ReferenceLine::Axis::y, 2.5, "lambda"});
  const auto svg = render_svg(spec);
  EXPECT_EQ(count(svg, "<polyline"), 5u);
  EXPECT_EQ(count(svg, "class=\"reference\""), 1u);
}

TEST(Plot, EmptySeriesIsUsageErrorAndNoFile) {
  const auto path = scratch("empty.svg");
  EXPECT_THROW(emit_plot(path, PlotSpec{"t", "x", "y", {{"s", {}, {}, {}, ""}}}), UsageError);
  EXPECT_FALSE(std::filesystem::exists(path));
  EXPECT_THROW(emit_plot(path, PlotSpec{"t", "x", "y", {}}), UsageError);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Plot, MismatchedLengthsAreUsageErrors) {
  const auto path = scratch("bad.svg");
  EXPECT_THROW(emit_plot(path, PlotSpec{"t", "x", "y", {{"s", {1, 2, 3}, {1, 2}, {}, ""}}}), UsageError);
  EXPECT_THROW(emit_plot(path, PlotSpec{"t", "x", "y", {{"s", {1, 2}, {1, 2}, {1}, ""}}}), UsageError);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Plot, NonFiniteRejected) {
  EXPECT_THROW(render_svg(PlotSpec{"t", "x", "y", {{"s", {1, 2}, {1, NAN}, {}, ""}}}), UsageError);
}

TEST(Plot, ConstantSeriesStillRenders) {
  const auto svg = render_svg(PlotSpec{"t", "x", "y", {{"s", {5}, {7}, {}, ""}}});
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
}

TEST(Plot, EscapesText) {
  const auto svg = render_svg(PlotSpec{"a<b & c", "x", "y", {{"s", {1, 2}, {1, 2}, {}, ""}}});
  EXPECT_NE(svg.find("a&lt;b &amp; c"), std::string::npos);
}

TEST(Plot, WritesFile) {
  const auto path = scratch("ok.svg");
  emit_plot(path, PlotSpec{"t", "x", "y", {{"s", {1, 2}, {1, 2}, {}, ""}}});
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_EQ(read_file(path), render_svg(PlotSpec{"t", "x", "y", {{"s", {1, 2}, {1, 2}, {}, ""}}}));
}

TEST(BarChart, OneRectPerValue) {
  BarChartSpec spec{"t", "y", {"A", "B", "C"}, {{"d", {}, {1, 2, 3}, {}, ""}, {"g", {}, {2, 2, 4}, {}, ""}}};
  const auto svg = render_bar_chart(spec);
  EXPECT_EQ(count(svg, "class=\"bar\""), 6u);
  spec.groups[1].y.pop_back();
  EXPECT_THROW(render_bar_chart(spec), UsageError);
}
