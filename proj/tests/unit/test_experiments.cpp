#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "gkdv/config.hpp"
#include "gkdv/experiments.hpp"
#include "gkdv/io.hpp"

using namespace gkdv;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gkdv_exp_" + name);
  fs::remove_all(d);
  return d;
}

config::ExperimentConfig reduced_cfg(const fs::path& out) {
  config::ExperimentConfig c;
  c.general.experiment = config::Experiment::reduced;
  c.general.output = out.string();
  c.reduced.samples = 401;
  return c;
}

#ifdef GKDV_LAB_PATH
int cli(const std::string& args) {
  const int rc = std::system((std::string(GKDV_LAB_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST(Run, ReducedPassesAndChecksumsEveryFile) {
  const auto d = fresh("reduced");
  const auto m = experiments::run(reduced_cfg(d));
  EXPECT_TRUE(m.error.empty()) << m.error;
  EXPECT_TRUE(m.passed());
  EXPECT_EQ(experiments::exit_code(m), 0);
  ASSERT_TRUE(fs::exists(d / "manifest.json"));
  for (const auto& f : m.files) {
    EXPECT_NE(f.path, "manifest.json");
    EXPECT_EQ(io::sha256_file(d / f.path), f.sha256) << f.path;
  }
  for (const char* name : {"trajectory.csv", "regime.json", "config.ini", "plot.py"}) {
    EXPECT_TRUE(fs::exists(d / name)) << name;
  }
  const auto back = experiments::read_manifest(d / "manifest.json");
  EXPECT_EQ(back.criteria.size(), m.criteria.size());
  EXPECT_EQ(back.config_text, m.config_text);
  EXPECT_EQ(config::serialize(config::load(d / "config.ini")), m.config_text);
}

TEST(Run, ArtifactsAreDeterministic) {
  const auto a = experiments::run(reduced_cfg(fresh("det_a")));
  const auto b = experiments::run(reduced_cfg(fresh("det_b")));
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    if (a.files[i].path == "config.ini") continue;  // output directory differs
    EXPECT_EQ(a.files[i].sha256, b.files[i].sha256) << a.files[i].path;
  }
}

TEST(Run, LibraryFailureIsRecordedNotThrown) {
  auto c = reduced_cfg(fresh("fail"));
  c.reduced.samples = 5;
  const auto m = experiments::run(c);
  EXPECT_FALSE(m.error.empty());
  EXPECT_EQ(experiments::exit_code(m), 1);
  EXPECT_TRUE(fs::exists(fs::path(c.general.output) / "manifest.json"));
}

TEST(Sweep, EmptyValueListProducesNothing) {
  const auto d = fresh("sweep_empty");
  EXPECT_TRUE(experiments::sweep(reduced_cfg(d), "beta", {}).empty());
  EXPECT_FALSE(fs::exists(d / "sweep.csv"));
}

TEST(Sweep, OneRunPerValueWithSummary) {
  const auto d = fresh("sweep");
  const auto out = experiments::sweep(reduced_cfg(d), "beta", {"0.25", "1/3"}, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(fs::exists(d / "beta-0.25" / "manifest.json"));
  EXPECT_TRUE(fs::exists(d / "sweep.csv"));
  EXPECT_TRUE(fs::exists(d / "sweep_manifest.json"));
  EXPECT_EQ(experiments::exit_code(out), 0);
}

TEST(Report, AggregatesChildManifests) {
  const auto d = fresh("report");
  experiments::sweep(reduced_cfg(d), "beta", {"0.25", "1/3", "0.5"});
  auto c = reduced_cfg(d);
  c.general.experiment = config::Experiment::report;
  const auto m = experiments::run(c);
  EXPECT_TRUE(m.passed()) << m.error;
  const auto csv = io::read_text(d / "summary.csv");
  EXPECT_NE(csv.find("(i) finite-time blow-up"), std::string::npos);
  EXPECT_NE(csv.find("(ii) exponential grow-up"), std::string::npos);
  EXPECT_NE(csv.find("(ii) power grow-up"), std::string::npos);
}

#ifdef GKDV_LAB_PATH
TEST(Cli, ExitCodes) {
  const auto d = fresh("cli");
  const std::string cfg = std::string(GKDV_CONFIG_DIR) + "/reduced.ini";
  EXPECT_EQ(cli("reduced --config " + cfg + " --out " + d.string() + " --set reduced.samples=401"), 0);
  EXPECT_EQ(cli("reduced --config " + cfg + " --out " + d.string() + " --set reduced.samples=5"), 1);
  EXPECT_EQ(cli("reduced --config " + cfg + " --set reduced.bogus=1"), 2);
  EXPECT_EQ(cli("nonsense --config " + cfg), 2);
  EXPECT_EQ(cli("reduced"), 2);
  EXPECT_EQ(cli("reduced --config /nonexistent.ini"), 2);
}
#endif
