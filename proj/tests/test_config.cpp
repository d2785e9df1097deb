#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "eigsgd/config.hpp"
#include "eigsgd/csv.hpp"
#include "eigsgd/presets.hpp"

using namespace eigsgd;

namespace {

const char* kMinimal = R"(
[problem]
rows = 30
cols = 20
sigma_min = 0.1
sigma_max = 1

[method]
name = sgd

[schedule]
type = harmonic
a = 0.5
b = 20

[run]
iters = 1000
probes = 1, 10, 20
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  if (at == std::string::npos) throw std::logic_error("fixture text not found: " + from);
  return text.replace(at, from.size(), to);
}

std::string error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST(ParseConfig, MinimalDocumentFillsDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.problem.rows, 30);
  EXPECT_EQ(cfg.problem.spacing, Spacing::linear);
  EXPECT_TRUE(cfg.consistency.consistent);
  EXPECT_EQ(cfg.method, Method::sgd);
  ASSERT_TRUE(cfg.schedule.has_value());
  EXPECT_EQ(*cfg.schedule, StepSchedule::harmonic(0.5, 20));
  EXPECT_EQ(cfg.probes, (std::vector<Index>{1, 10, 20}));
  EXPECT_EQ(cfg.plan.repetitions, 1);
  EXPECT_EQ(cfg.recording, Recording::geometric(64));
  EXPECT_EQ(cfg.x0_radius, 1.0);
  EXPECT_TRUE(cfg.emit_theory);
  EXPECT_TRUE(cfg.emit_plot_script);
}

TEST(ParseConfig, GammaOfOneIsRejectedWithTheInterval) {
  std::string text = replace(kMinimal, "type = harmonic", "type = polynomial\ngamma = 1.0");
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "schedule.gamma");
    EXPECT_NE(std::string(e.what()).find("(1/2, 1)"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, UnknownSectionsAndKeysAreNamed) {
  EXPECT_EQ(error_key(std::string(kMinimal) + "\n[extras]\nfoo = 1\n"), "extras");
  EXPECT_EQ(error_key(replace(kMinimal, "iters = 1000", "iters = 1000\nitres = 5")), "run.itres");
  EXPECT_EQ(error_key(replace(kMinimal, "b = 20", "b = 20\nalpha = 0.1")), "schedule.alpha");
}

TEST(ParseConfig, MissingRequiredKeysAreNamed) {
  EXPECT_EQ(error_key(replace(kMinimal, "rows = 30\n", "")), "problem.rows");
  EXPECT_EQ(error_key(replace(kMinimal, "iters = 1000\n", "")), "run.iters");
  EXPECT_EQ(error_key(replace(kMinimal, "probes = 1, 10, 20\n", "")), "run.probes");
  EXPECT_EQ(error_key(replace(kMinimal, "type = harmonic\n", "")), "schedule.type");
  EXPECT_EQ(error_key(replace(kMinimal, "name = sgd\n", "")), "method.name");
}

TEST(ParseConfig, TypeErrorsAreNamed) {
  EXPECT_EQ(error_key(replace(kMinimal, "rows = 30", "rows = thirty")), "problem.rows");
  EXPECT_EQ(error_key(replace(kMinimal, "a = 0.5", "a = 0.5x")), "schedule.a");
  EXPECT_EQ(error_key(replace(kMinimal, "iters = 1000", "iters = 1.5")), "run.iters");
  EXPECT_EQ(error_key(replace(kMinimal, "probes = 1, 10, 20", "probes = 1, 21")), "run.probes");
  EXPECT_EQ(error_key(replace(kMinimal, "name = sgd", "name = adam")), "method.name");
  EXPECT_EQ(error_key(std::string(kMinimal) + "[output]\nemit_theory = maybe\n"), "output.emit_theory");
}

TEST(ParseConfig, ConsistencyRules) {
  const std::string noisy = replace(kMinimal, "sigma_max = 1", "sigma_max = 1\nconsistency = inconsistent\nnoise_level = 0.5");
  const auto cfg = parse_config(noisy);
  EXPECT_FALSE(cfg.consistency.consistent);
  EXPECT_EQ(cfg.consistency.noise_level, 0.5);
  EXPECT_EQ(error_key(replace(kMinimal, "sigma_max = 1", "sigma_max = 1\nnoise_level = 0.5")), "problem.noise_level");
  EXPECT_EQ(error_key(replace(kMinimal, "sigma_max = 1", "sigma_max = 1\nconsistency = inconsistent")),
            "problem.noise_level");
  EXPECT_EQ(error_key(replace(replace(noisy, "rows = 30", "rows = 20"), "probes = 1, 10, 20", "probes = 1")),
            "problem.consistency");
}

TEST(ParseConfig, KaczmarzIgnoresSchedule) {
  const auto cfg = parse_config(replace(kMinimal, "name = sgd", "name = kaczmarz"));
  EXPECT_EQ(cfg.method, Method::kaczmarz);
  EXPECT_FALSE(cfg.schedule.has_value());
  const auto bare = parse_config(replace(replace(kMinimal, "name = sgd", "name = kaczmarz"),
                                         "[schedule]\ntype = harmonic\na = 0.5\nb = 20\n", ""));
  EXPECT_FALSE(bare.schedule.has_value());
}

TEST(ParseConfig, MalformedTextIsAConfigError) {
  EXPECT_THROW(parse_config("[problem\nrows = 3\n"), ConfigError);
}

TEST(ParseConfig, RecordingOptions) {
  EXPECT_EQ(parse_config(replace(kMinimal, "iters = 1000", "iters = 1000\nrecording = all")).recording,
            Recording::every());
  EXPECT_EQ(error_key(replace(kMinimal, "iters = 1000", "iters = 1000\nrecording = all\npoints_per_decade = 8")),
            "run.points_per_decade");
}

TEST(SerializeConfig, RoundTripsEveryPreset) {
  for (const auto& name : preset_names())
    for (Scale s : {Scale::desk, Scale::paper}) {
      const auto cfg = preset(name, s);
      EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << name;
    }
}

TEST(SerializeConfig, RoundTripsAwkwardDoubles) {
  auto cfg = parse_config(kMinimal);
  cfg.schedule = StepSchedule::fixed(0.1 + 0.2);
  cfg.problem.sigma_min = 1.0 / 3.0;
  cfg.x0_radius = 2.5e-7;
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(LoadConfig, ReadsFileAndReportsMissing) {
  const auto dir = std::filesystem::temp_directory_path() / "eigsgd_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "x.ini") << kMinimal;
  }
  EXPECT_EQ(load_config(dir / "x.ini"), parse_config(kMinimal));
  EXPECT_ANY_THROW(load_config(dir / "missing.ini"));
  std::filesystem::remove_all(dir);
}

TEST(Presets, FigureParameters) {
  const auto f1 = preset("fig1");
  EXPECT_EQ(f1.method, Method::kaczmarz);
  EXPECT_EQ(f1.problem.rows, 300);
  EXPECT_EQ(f1.problem.cols, 150);
  EXPECT_EQ(f1.probes, (std::vector<Index>{1, 135, 150}));

  const auto f2 = preset("fig2");
  EXPECT_EQ(*f2.schedule, StepSchedule::harmonic(0.5, 20));
  EXPECT_EQ(f2.problem.sigma_min, 0.1);
  EXPECT_TRUE(f2.consistency.consistent);

  const auto f3 = preset("fig3");
  EXPECT_FALSE(f3.consistency.consistent);
  EXPECT_EQ(f3.consistency.noise_level, kPresetNoiseLevel);

  EXPECT_EQ(*preset("fig5").schedule, StepSchedule::polynomial(0.2, 5, 0.8));
  EXPECT_EQ(preset("fig7").iters, 1000000);
  EXPECT_EQ(*preset("fig8").schedule, StepSchedule::polynomial(0.06, 50, 0.7));

  const auto f4p = preset("fig4", Scale::paper);
  EXPECT_EQ(f4p.problem.rows, 10000);
  EXPECT_EQ(f4p.problem.cols, 3000);
  EXPECT_EQ(preset("fig8", Scale::paper).problem.cols, 2000);
  EXPECT_EQ(preset("fig4", Scale::desk).problem.cols, 300);
  EXPECT_EQ(preset("fig2", Scale::paper), preset("fig2", Scale::desk));
  EXPECT_THROW(preset("fig9"), std::invalid_argument);
  EXPECT_EQ(parse_scale("paper"), Scale::paper);
  EXPECT_THROW(parse_scale("huge"), std::invalid_argument);
}

TEST(Csv, TextRoundTrip) {
  CsvTable t;
  t.metadata = {{"experiment", "x"}, {"kind", "ensemble"}};
  t.columns = {"iter", "comp_1", "norm_sq"};
  t.rows = {{0, -0.1, 1.0}, {10, 1.0 / 3.0, 5e-300}};
  const std::string text = to_csv_text(t);
  const auto back = parse_csv_text(text);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.metadata, t.metadata);
  EXPECT_EQ(back.column_values("comp_1"), (std::vector<double>{-0.1, 1.0 / 3.0}));
  EXPECT_THROW(back.column("missing"), std::out_of_range);
  EXPECT_EQ(csv_body(text).rfind("iter,", 0), 0u);
}
