#include "config.hpp"

#include <fstream>
#include <variant>

#include "doctest.h"
#include "helpers.hpp"

using namespace afa;

TEST_SUITE("config") {

TEST_CASE("defaults validate and the serialisation round-trips") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  std::string toml = cfg.to_toml();
  PipelineConfig back = PipelineConfig::parse_toml(toml);
  CHECK(back.to_toml() == toml);
  CHECK(back.hash() == cfg.hash());
  CHECK(cfg.hash().size() == 64);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  PipelineConfig cfg;
  CHECK(cfg.hash() == sha256_hex(cfg.to_toml()));
}

TEST_CASE("every setting feeds the hash") {
  PipelineConfig base;
  std::vector<std::pair<std::string, std::string>> tweaks{
      {"scales", "fh:50"},     {"fh_min_size", "5"},
      {"fh_sigma", "0.4"},     {"denoise", "gaussian"},
      {"denoise_target", "image"}, {"alpha", "0.7"},
      {"psi", "4"},            {"tau", "0.001"},
      {"e", "2"},              {"g", "4"},
      {"damping", "0.8"},      {"apc_max_iter", "200"},
      {"apc_conv_window", "10"}, {"nodes_mode", "kmeans"},
      {"node_rule", "all_clusters"}, {"d", "10"},
      {"lambda1", "2"},        {"m_update", "eq15"},
      {"graph_mode", "adjacency"}, {"affinity", "gaussian"},
      {"beta", "0.01"},        {"kt", "4"},
      {"kt_min", "2"},         {"kt_max", "10"},
      {"seed", "9"},           {"voi_log", "bits"},
      {"debug_dir", "/tmp/x"}};
  for (auto& [key, value] : tweaks) {
    PipelineConfig cfg;
    cfg.set(key, value);
    CHECK_MESSAGE(cfg.hash() != base.hash(), key);
    CHECK(cfg.get(key) == value);
    // Settings survive a serialisation cycle.
    PipelineConfig cycled = PipelineConfig::parse_toml(cfg.to_toml());
    CHECK_MESSAGE(cycled.get(key) == value, key);
  }
}

TEST_CASE("unknown keys and sections are rejected") {
  PipelineConfig cfg;
  CHECK_THROWS_AS(cfg.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.get("bogus"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::parse_toml("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::parse_toml("[section]\nkt = 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(cfg.set("kt", "two"), ConfigError);
  CHECK_THROWS_AS(cfg.set("denoise", "median"), ConfigError);
}

TEST_CASE("range validation") {
  auto broken = [](const std::string& key, const std::string& value) {
    PipelineConfig cfg;
    cfg.set(key, value);
    return cfg;
  };
  CHECK_THROWS_AS(broken("alpha", "0").validate(), ConfigError);
  CHECK_THROWS_AS(broken("alpha", "1.5").validate(), ConfigError);
  CHECK_THROWS_AS(broken("damping", "1").validate(), ConfigError);
  CHECK_THROWS_AS(broken("psi", "0").validate(), ConfigError);
  CHECK_THROWS_AS(broken("tau", "-1e-9").validate(), ConfigError);
  CHECK_THROWS_AS(broken("kt_min", "50").validate(), ConfigError);  // > kt_max
  CHECK_THROWS_AS(broken("beta", "0").validate(), ConfigError);
  CHECK_THROWS_AS(broken("lambda1", "0").validate(), ConfigError);
  CHECK_THROWS_AS(broken("scales", "fh:abc").validate(), ConfigError);
  CHECK_THROWS_AS(broken("scales", "").validate(), ConfigError);
  CHECK_NOTHROW(broken("kt_max", "40").validate());
}

TEST_CASE("scale entries parse shorthand and overrides") {
  PipelineConfig cfg;
  std::vector<ScaleSpec> defaults = cfg.scale_specs();
  REQUIRE(defaults.size() == 5);
  double expected_k[5] = {50, 100, 150, 200, 300};
  for (int i = 0; i < 5; ++i) {
    const FhParams& p = std::get<FhParams>(defaults[i]);
    CHECK(p.k == expected_k[i]);
    CHECK(p.min_size == 20);
    CHECK(p.sigma == 0.8);
  }

  cfg.set("scales", "fh:25:5:1.5,map:/tmp/ext.pgm");
  std::vector<ScaleSpec> custom = cfg.scale_specs();
  REQUIRE(custom.size() == 2);
  const FhParams& p = std::get<FhParams>(custom[0]);
  CHECK(p.k == 25.0);
  CHECK(p.min_size == 5);
  CHECK(p.sigma == 1.5);
  CHECK(std::get<std::string>(custom[1]) == "/tmp/ext.pgm");

  // Paths keep any later colons.
  cfg.set("scales", "map:c:/maps/a.pgm");
  CHECK(std::get<std::string>(cfg.scale_specs()[0]) == "c:/maps/a.pgm");
}

TEST_CASE("voi log base maps onto the boolean flag") {
  PipelineConfig cfg;
  CHECK(cfg.get("voi_log") == "nat");
  CHECK(!cfg.voi_bits);
  cfg.set("voi_log", "bits");
  CHECK(cfg.voi_bits);
  CHECK(cfg.get("voi_log") == "bits");
  CHECK_THROWS_AS(cfg.set("voi_log", "log10"), ConfigError);
}

TEST_CASE("files load with comments, blanks, and quotes") {
  std::string dir = testhelp::make_temp_dir("config");
  std::string path = dir + "/pipe.toml";
  {
    std::ofstream out(path);
    out << "# pipeline overrides\n"
        << "\n"
        << "alpha = 0.5\n"
        << "scales = \"fh:40,fh:80\"\n"
        << "denoise = \"gaussian\"\n"
        << "kt_max = 12\n";
  }
  PipelineConfig cfg = PipelineConfig::load_toml_file(path);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.denoise == DenoiseMode::kGaussian);
  CHECK(cfg.kt_max == 12);
  CHECK(cfg.scale_specs().size() == 2);
  // Untouched keys keep their defaults.
  CHECK(cfg.psi == 3);
  CHECK_THROWS_AS(PipelineConfig::load_toml_file(dir + "/missing.toml"),
                  DataError);
  testhelp::remove_tree(dir);
}

}  // TEST_SUITE
