#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "linkprof/scenario.hpp"

using namespace linkprof;
using Catch::Approx;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

ScenarioConfig tiny_config() {
  auto c = preset("single_injection");
  c.signal.symbols_per_block = 1u << 10;
  c.signal.blocks = 2;
  c.ssfm.step_km = 5.0;
  c.estimator.z_step_km = 40.0;
  return c;
}

}  // namespace

TEST_CASE("validate: rejects bad fields with named paths") {
  auto c = preset("single_injection");
  REQUIRE_NOTHROW(validate(c));

  SECTION("non power-of-two block size") {
    c.signal.symbols_per_block = 1000;
    REQUIRE_THROWS_WITH(validate(c),
                        Catch::Matchers::ContainsSubstring("symbols_per_block"));
  }
  SECTION("zero blocks") {
    c.signal.blocks = 0;
    REQUIRE_THROWS_WITH(validate(c), Catch::Matchers::ContainsSubstring("blocks"));
  }
  SECTION("bad pol count") {
    c.signal.pol_count = 3;
    REQUIRE_THROWS_WITH(validate(c), Catch::Matchers::ContainsSubstring("pol_count"));
  }
  SECTION("no spans") {
    c.link.spans.clear();
    REQUIRE_THROWS_WITH(validate(c), Catch::Matchers::ContainsSubstring("spans"));
  }
  SECTION("bad ssfm step") {
    c.ssfm.step_km = 0.0;
    REQUIRE_THROWS_WITH(validate(c), Catch::Matchers::ContainsSubstring("step_km"));
  }
  SECTION("neighbor outside simulated band") {
    WdmNeighbor nb;
    nb.center_offset_hz = 200e9;  // beyond fs/2 = 68 GHz at sps=2
    nb.power_dbm = -10.0;
    c.link.wdm_neighbors = {nb};
    REQUIRE_THROWS_WITH(validate(c),
                        Catch::Matchers::ContainsSubstring("wdm_neighbors"));
  }
}

TEST_CASE("presets: link layouts match their scenarios") {
  SECTION("single_injection: 6x80 km, 0 dBm, one set-SNR source at span 4") {
    auto c = preset("single_injection");
    REQUIRE(c.link.spans.size() == 6);
    for (const auto& s : c.link.spans) REQUIRE(s.length_km == 80.0);
    REQUIRE(c.link.launch_power_dbm == 0.0);
    REQUIRE(c.link.noise_injections.size() == 1);
    REQUIRE(c.link.noise_injections[0].at_span_input == 4);
    REQUIRE(c.link.noise_injections[0].set_snr_db.value() == 20.0);
    REQUIRE(c.signal.baud_hz == 68e9);
    REQUIRE(c.signal.pol_count == 2);
    REQUIRE(c.signal.rolloff == Approx(0.1));
  }
  SECTION("per_span_injection: one source per span input") {
    auto c = preset("per_span_injection");
    REQUIRE(c.link.noise_injections.size() == 6);
    for (std::size_t k = 0; k < 6; ++k)
      REQUIRE(c.link.noise_injections[k].at_span_input == k + 1);
  }
  SECTION("cascade: 12x80 km with noisy line amps") {
    auto c = preset("cascade");
    REQUIRE(c.link.spans.size() == 12);
    REQUIRE(c.link.amps.size() == 11);
    for (const auto& a : c.link.amps) {
      REQUIRE(a.noise_mode == NoiseMode::set_snr);
      REQUIRE(a.set_snr_db == 20.0);
    }
  }
  SECTION("pointloss: 12x75 km, 5 dBm, 7 dB loss after span 4") {
    auto c = preset("pointloss");
    REQUIRE(c.link.spans.size() == 12);
    REQUIRE(c.link.spans[0].length_km == 75.0);
    REQUIRE(c.link.launch_power_dbm == 5.0);
    REQUIRE(c.link.point_losses.size() == 1);
    REQUIRE(c.link.point_losses[0].after_span == 4);
    REQUIRE(c.link.point_losses[0].loss_db == 7.0);
  }
  SECTION("xpm: four neighbors on a 75 GHz grid") {
    auto c = preset("xpm");
    REQUIRE(c.link.wdm_neighbors.size() == 4);
    std::vector<double> offsets;
    for (const auto& nb : c.link.wdm_neighbors) {
      offsets.push_back(nb.center_offset_hz);
      REQUIRE(nb.power_dbm == -10.0);
    }
    std::sort(offsets.begin(), offsets.end());
    REQUIRE(offsets == std::vector<double>{-150e9, -75e9, 75e9, 150e9});
    REQUIRE_NOTHROW(validate(c));  // sps=6 keeps the band inside fs/2
  }
  SECTION("unknown preset rejected") {
    REQUIRE_THROWS_AS(preset("nonesuch"), config_error);
  }
}

TEST_CASE("scenario json round trip preserves the configuration") {
  auto c = preset("pointloss");
  c.deviations.push_back("extra note");
  nlohmann::json j = c;
  auto back = j.get<ScenarioConfig>();
  nlohmann::json j2 = back;
  REQUIRE(j == j2);
  REQUIRE(back.seed == c.seed);
  REQUIRE(back.link.point_losses[0].loss_db == 7.0);
}

TEST_CASE("scenario json: seed is required") {
  nlohmann::json j = preset("single_injection");
  j.erase("seed");
  REQUIRE_THROWS(j.get<ScenarioConfig>());
}

TEST_CASE("block seeds are distinct across blocks and streams") {
  auto s0 = detail::block_seeds(1234, 0);
  auto s1 = detail::block_seeds(1234, 1);
  REQUIRE(s0.symbols != s0.propagation);
  REQUIRE(s0.symbols != s1.symbols);
  REQUIRE(s0.propagation != s1.propagation);
  REQUIRE(detail::block_seeds(1235, 0).symbols != s0.symbols);
}

TEST_CASE("run: byte-identical artifacts for the same seed") {
  namespace fs = std::filesystem;
  auto c = tiny_config();
  const fs::path base = fs::temp_directory_path() / "linkprof_repro";
  fs::remove_all(base);
  c.outputs = (base / "a").string();
  auto r1 = run(c);
  c.outputs = (base / "b").string();
  auto r2 = run(c);

  for (const char* name : {"ppe.csv", "nppe.csv", "gosnr.csv"}) {
    const std::string a = read_file(base / "a" / name);
    const std::string b = read_file(base / "b" / name);
    REQUIRE(!a.empty());
    REQUIRE(a == b);
  }

  c.outputs = (base / "c").string();
  c.seed += 1;
  run(c);
  REQUIRE(read_file(base / "a" / "ppe.csv") != read_file(base / "c" / "ppe.csv"));
  fs::remove_all(base);
}

TEST_CASE("run: manifest lists artifacts, config hash, and deviations") {
  namespace fs = std::filesystem;
  auto c = tiny_config();
  const fs::path base = fs::temp_directory_path() / "linkprof_manifest";
  fs::remove_all(base);
  c.outputs = base.string();
  auto r = run(c);
  const auto manifest = nlohmann::json::parse(read_file(base / "manifest.json"));
  REQUIRE(manifest.contains("config"));
  REQUIRE(manifest.contains("config_hash"));
  REQUIRE(manifest.contains("artifacts"));
  REQUIRE(manifest.contains("block_seeds"));
  REQUIRE(manifest["deviations"].size() >= 2);
  for (const auto& a : manifest["artifacts"])
    REQUIRE(fs::exists(a.get<std::string>()));
  fs::remove_all(base);
}
