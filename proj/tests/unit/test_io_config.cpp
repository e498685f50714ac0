#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "gkdv/config.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/io.hpp"

using namespace gkdv;
namespace fs = std::filesystem;

TEST(FormatDouble, RoundTripsRandomBitPatterns) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  }
}

TEST(FormatDouble, SpecialValuesAndFractions) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_TRUE(std::isinf(io::parse_double(io::format_double(std::numeric_limits<double>::infinity()))));
  EXPECT_TRUE(std::isnan(io::parse_double(io::format_double(std::nan("")))));
  EXPECT_EQ(io::parse_double("1/3"), 1.0 / 3.0);
  EXPECT_EQ(io::parse_double(" -3/4 "), -0.75);
  for (const char* bad : {"", "abc", "1/0", "1//2", "2x"}) EXPECT_THROW(io::parse_double(bad), Error) << bad;
}

TEST(Csv, QuotesCellsThatNeedIt) {
  io::CsvTable t({"a", "b"});
  t.add_row(std::vector<double>{1.5, -2.0});
  t.add_row(std::vector<std::string>{"x,y", "say \"hi\""});
  EXPECT_EQ(t.str(), "a,b\n1.5,-2\n\"x,y\",\"say \"\"hi\"\"\"\n");
  EXPECT_THROW(t.add_row(std::vector<double>{1.0}), Error);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Files, ListingIsSortedAndHonoursExclusions) {
  const fs::path d = fs::temp_directory_path() / "gkdv_io_list";
  fs::remove_all(d);
  fs::create_directories(d / "sub");
  io::write_text(d / "b.txt", "abc");
  io::write_text(d / "a.txt", "");
  io::write_text(d / "sub" / "c.txt", "x");
  io::write_text(d / "skip.json", "{}");
  const auto f = io::list_files(d, {"skip.json"});
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].path, "a.txt");
  EXPECT_EQ(f[1].path, "b.txt");
  EXPECT_EQ(f[1].sha256, io::sha256_hex("abc"));
  EXPECT_EQ(f[1].bytes, 3u);
  EXPECT_EQ(f[2].path, "sub/c.txt");
  EXPECT_EQ(io::read_text(d / "b.txt"), "abc");
  EXPECT_THROW(io::read_text(d / "missing"), Error);
  fs::remove_all(d);
}

TEST(Config, DefaultsSerializeAndParseBack) {
  config::ExperimentConfig c;
  const auto text = config::serialize(c);
  EXPECT_EQ(config::serialize(config::parse(text)), text);
}

TEST(Config, RoundTripPreservesEveryKeyExactly) {
  config::ExperimentConfig c;
  config::set_value(c, "beta", "1/3");
  config::set_value(c, "tail.x0", "123.456789012345678");
  config::set_value(c, "shoot.model", "full-pde");
  config::set_value(c, "general.experiment", "shoot");
  const auto back = config::parse(config::serialize(c));
  EXPECT_EQ(back.general.beta, 1.0 / 3.0);
  EXPECT_EQ(back.tail.x0, 123.456789012345678);
  EXPECT_EQ(back.shoot.model, "full-pde");
  EXPECT_EQ(back.general.experiment, config::Experiment::shoot);
  for (const auto& k : config::keys()) EXPECT_EQ(config::get_value(back, k), config::get_value(c, k)) << k;
}

TEST(Config, RejectsUnknownOrMisplacedKeys) {
  EXPECT_THROW(config::parse("[general]\nbogus = 1\n"), Error);
  EXPECT_THROW(config::parse("[nowhere]\nbeta = 1\n"), Error);
  EXPECT_THROW(config::parse("beta = 0.4\n"), Error);
  EXPECT_THROW(config::parse("[general]\nbeta = zero\n"), Error);
  config::ExperimentConfig c;
  EXPECT_THROW(config::set_value(c, "tail.nothing", "1"), Error);
  EXPECT_THROW(config::parse_experiment("nope"), Error);
}

TEST(Config, ValidationCatchesOutOfRangeValues) {
  config::ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.general.beta = 0.6;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.general.s0 = -1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.shoot.model = "other";
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, SweepKeysDependOnExperiment) {
  config::ExperimentConfig c;
  EXPECT_EQ(config::sweep_key(c, "beta"), "general.beta");
  EXPECT_EQ(config::sweep_key(c, "B"), "full.B");
  EXPECT_EQ(config::sweep_key(c, "x0"), "tail.x0");
  c.general.experiment = config::Experiment::tail;
  EXPECT_EQ(config::sweep_key(c, "resolution"), "tail.n");
  c.general.experiment = config::Experiment::profiles;
  EXPECT_EQ(config::sweep_key(c, "resolution"), "profiles.n");
  EXPECT_THROW(config::sweep_key(c, "colour"), Error);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"profiles", "reduced", "tail", "full", "shoot", "report"}) {
    const auto c = config::load(fs::path(GKDV_CONFIG_DIR) / (std::string(name) + ".ini"));
    EXPECT_EQ(config::to_string(c.general.experiment), name);
  }
}
