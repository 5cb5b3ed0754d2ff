#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxband/cli.hpp"

namespace fs = std::filesystem;
using fluxband::run_cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("fluxband_cli_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct EnvGuard {
  std::string name;
  std::optional<std::string> saved;
  EnvGuard(const std::string& n, const std::string& value) : name(n) {
    if (const char* cur = std::getenv(n.c_str())) saved = cur;
    setenv(n.c_str(), value.c_str(), 1);
  }
  ~EnvGuard() {
    if (saved)
      setenv(name.c_str(), saved->c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream is(line);
  std::string f;
  while (std::getline(is, f, ',')) fields.push_back(f);
  return fields;
}

std::int64_t read_i64(const std::string& data, std::size_t off) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i)
    bits = (bits << 8) | static_cast<unsigned char>(data[off + i]);
  return static_cast<std::int64_t>(bits);
}

double read_f64(const std::string& data, std::size_t off) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i)
    bits = (bits << 8) | static_cast<unsigned char>(data[off + i]);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

nlohmann::json read_json(const std::string& path) {
  return nlohmann::json::parse(read_file(path));
}

}  // namespace

TEST_CASE("angle strings") {
  CHECK(fluxband::parse_angle("pi") == M_PI);
  CHECK(fluxband::parse_angle("-pi/2") == -0.5 * M_PI);
  CHECK(fluxband::parse_angle("0.5pi") == 0.5 * M_PI);
  CHECK(std::abs(fluxband::parse_angle("2pi/3") - 2.0 * M_PI / 3.0) <= 1e-15);
  CHECK(std::abs(fluxband::parse_angle("3pi/4") - 0.75 * M_PI) <= 1e-15);
  CHECK(fluxband::parse_angle("1.2") == 1.2);
  CHECK(fluxband::parse_angle(" pi / 2 ") == 0.5 * M_PI);
  CHECK_THROWS_AS(fluxband::parse_angle("pi/0"), std::invalid_argument);
  CHECK_THROWS_AS(fluxband::parse_angle("xpi"), std::invalid_argument);
  CHECK_THROWS_AS(fluxband::parse_angle("2pi3"), std::invalid_argument);
  CHECK_THROWS_AS(fluxband::parse_angle(""), std::invalid_argument);
}

TEST_CASE("gamma strings") {
  CHECK(fluxband::parse_gamma("0.75", 1.0, 0.0) == 0.75);
  CHECK(fluxband::parse_gamma("fb", 1.0, 0.5 * M_PI) == 1.0);
  CHECK(std::abs(fluxband::parse_gamma("fb", 0.5, M_PI / 3.0) -
                 0.5 * std::sin(M_PI / 3.0)) <= 1e-15);
  CHECK_THROWS_AS(fluxband::parse_gamma("abc", 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fluxband::parse_gamma("fb", 1.0, -0.25 * M_PI), std::invalid_argument);
}

TEST_CASE("band scan writes the declared files") {
  TempDir dir;
  const int rc = run_cli({"bands", "--J", "0.5", "--phi", "pi/3", "--v", "2",
                          "--gamma", "fb", "--nk", "51", "--out", dir.str()});
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(dir.file("bands.csv")));
  REQUIRE(fs::exists(dir.file("bands.svg")));
  REQUIRE(fs::exists(dir.file("config.json")));

  const auto lines = lines_of(read_file(dir.file("bands.csv")));
  REQUIRE(lines.size() == 1 + 51 * 3);
  CHECK(lines[0] == "k,band_index,re,im");

  double flat_dev[3] = {0.0, 0.0, 0.0};
  double max_im = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = fields_of(lines[i]);
    REQUIRE(f.size() == 4);
    const int b = std::stoi(f[1]);
    flat_dev[b] = std::max(flat_dev[b], std::abs(std::stod(f[2]) + 0.25));
    max_im = std::max(max_im, std::abs(std::stod(f[3])));
  }
  CHECK(std::min({flat_dev[0], flat_dev[1], flat_dev[2]}) <= 1e-9);
  CHECK(max_im <= 1e-9);

  const nlohmann::json cfg = read_json(dir.file("config.json"));
  CHECK(cfg.at("command") == "bands");
  CHECK(std::abs(cfg.at("lattice").at("gamma").get<double>() -
                 0.5 * std::sin(M_PI / 3.0)) <= 1e-15);
}

TEST_CASE("identical invocations produce identical bytes") {
  TempDir a, b;
  const std::vector<std::string> tail = {"--J",  "0.7", "--phi", "1.1",
                                         "--v",  "1.3", "--gamma", "0.4",
                                         "--nk", "41"};
  std::vector<std::string> run_a = {"bands", "--out", a.str()};
  std::vector<std::string> run_b = {"bands", "--out", b.str()};
  run_a.insert(run_a.end(), tail.begin(), tail.end());
  run_b.insert(run_b.end(), tail.begin(), tail.end());
  REQUIRE(run_cli(run_a) == 0);
  REQUIRE(run_cli(run_b) == 0);
  CHECK(read_file(a.file("bands.csv")) == read_file(b.file("bands.csv")));
}

TEST_CASE("a saved config reproduces the run") {
  TempDir a, b;
  REQUIRE(run_cli({"bands", "--J", "0.6", "--phi", "2pi/3", "--v", "1.4", "--gamma",
                   "0.5", "--nk", "31", "--out", a.str()}) == 0);
  REQUIRE(run_cli({"--config", a.file("config.json"), "--out", b.str()}) == 0);
  CHECK(read_file(a.file("bands.csv")) == read_file(b.file("bands.csv")));

  SECTION("config plus subcommand is ambiguous") {
    CHECK(run_cli({"--config", a.file("config.json"), "bands"}) == 2);
  }
  SECTION("missing config file") {
    CHECK(run_cli({"--config", a.file("nope.json")}) == 2);
  }
  SECTION("unsupported schema version") {
    std::ofstream os(a.file("future.json"));
    os << "{\"schema_version\": 99}\n";
    os.close();
    CHECK(run_cli({"--config", a.file("future.json")}) == 2);
  }
}

TEST_CASE("phase map grid and legend") {
  TempDir dir;
  REQUIRE(run_cli({"phase", "--grid", "12x10", "--out", dir.str()}) == 0);
  const nlohmann::json out = read_json(dir.file("phase_map.json"));

  REQUIRE(out.at("ep_counts").size() == 10);
  REQUIRE(out.at("ep_counts")[0].size() == 12);
  REQUIRE(out.at("locations").size() == 10);
  CHECK(out.at("location_legend").at("0") == "inside_gap");
  CHECK(out.at("location_legend").at("1") == "intersecting");
  CHECK(out.at("location_legend").at("2") == "outside_bands");

  const double uu = 2.5 * 3.0 / 12.0;
  const double vv = 1.5 * 3.0 / 10.0;
  const auto pc = fluxband::classify_phase(uu, vv, 1.0, 0.0);
  CHECK(out.at("ep_counts")[1][2].get<int>() == pc.ep_count);
  CHECK(out.at("locations")[1][2].get<int>() == static_cast<int>(pc.location));

  CHECK(run_cli({"phase", "--grid", "12", "--out", dir.str()}) == 2);
}

TEST_CASE("degeneracy listing") {
  SECTION("triple points of the uncoupled chain") {
    TempDir dir;
    REQUIRE(run_cli({"eps", "--J", "0", "--v", "0.5", "--out", dir.str()}) == 0);
    const auto lines = lines_of(read_file(dir.file("eps.csv")));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "k,order,re,im,merged");
    const auto row1 = fields_of(lines[1]);
    const auto row2 = fields_of(lines[2]);
    CHECK(std::abs(std::stod(row1[0]) + 2.0 * M_PI / 3.0) <= 1e-12);
    CHECK(std::abs(std::stod(row2[0]) - 2.0 * M_PI / 3.0) <= 1e-12);
    CHECK(row1[1] == "EP3");
    CHECK(row2[1] == "EP3");
  }
  SECTION("off the flat-band manifold the listing is refused") {
    TempDir dir;
    CHECK(run_cli({"eps", "--J", "1", "--gamma", "0.1", "--phi", "0", "--out",
                   dir.str()}) == 2);
  }
  SECTION("Hermitian touchings") {
    TempDir dir;
    REQUIRE(run_cli({"eps", "--diabolic", "--v", "0.5", "--out", dir.str()}) == 0);
    const auto lines = lines_of(read_file(dir.file("eps.csv")));
    REQUIRE(lines.size() == 3);
    CHECK(fields_of(lines[1])[1] == "DP");
    CHECK(fields_of(lines[2])[1] == "DP");
    CHECK(run_cli({"eps", "--diabolic", "--J", "1", "--out", dir.str()}) == 2);
  }
}

TEST_CASE("finite-chain spectrum with a raw matrix dump") {
  TempDir dir;
  REQUIRE(run_cli({"spectrum", "--gamma", "0.3", "--v", "1", "--J", "0.5", "--cells",
                   "4", "--dump-matrix", "both", "--out", dir.str()}) == 0);

  const auto lines = lines_of(read_file(dir.file("spectrum.csv")));
  REQUIRE(lines.size() == 1 + 12);
  CHECK(lines[0] == "index,re,im");

  REQUIRE(fs::exists(dir.file("hamiltonian.csv")));
  const std::string bin = read_file(dir.file("hamiltonian.bin"));
  REQUIRE(bin.size() == 16 + 12 * 12 * 16);
  CHECK(read_i64(bin, 0) == 12);
  CHECK(read_i64(bin, 8) == 12);
  CHECK(read_f64(bin, 16) == 0.0);
  CHECK(read_f64(bin, 24) == 0.3);

  CHECK(run_cli({"spectrum", "--dump-matrix", "hex", "--out", dir.str()}) == 2);
}

TEST_CASE("localized-state construction report") {
  TempDir dir;
  REQUIRE(run_cli({"cls", "--state", "inner", "--center", "4", "--gamma", "0.5",
                   "--v", "1.5", "--J", "1", "--phi", "pi/2", "--cells", "10",
                   "--boundary", "open", "--out", dir.str()}) == 0);

  const auto lines = lines_of(read_file(dir.file("state.csv")));
  REQUIRE(lines.size() == 1 + 30);
  CHECK(lines[0] == "cell,site,re,im");

  const nlohmann::json verify = read_json(dir.file("verify.json"));
  CHECK(verify.at("energy").at("re").get<double>() == 0.0);
  CHECK(verify.at("energy").at("im").get<double>() == 0.0);
  CHECK(verify.at("residual").get<double>() <= 1e-12);
  CHECK(verify.at("support_cells") == nlohmann::json({3, 4, 5}));
}

TEST_CASE("canned confinement runs") {
  SECTION("edge preset") {
    TempDir dir;
    REQUIRE(run_cli({"evolve", "--preset", "edge-confinement", "--t-final", "1",
                     "--out", dir.str()}) == 0);
    const nlohmann::json summary = read_json(dir.file("summary.json"));
    CHECK(summary.at("support_cells") == nlohmann::json({1, 2}));
    CHECK(summary.at("max_intensity_outside_support").get<double>() <= 1e-8);
    CHECK(summary.at("max_norm_drift").get<double>() <= 1e-6);
    CHECK_FALSE(summary.at("overflow_truncated").get<bool>());
    CHECK(summary.at("final_time").get<double>() == 1.0);

    const nlohmann::json cfg = read_json(dir.file("config.json"));
    CHECK(cfg.at("lattice").at("gamma").get<double>() == 0.5);
    CHECK(cfg.at("lattice").at("boundary") == "open");
    CHECK(cfg.at("lattice").at("cells").get<int>() == 10);
    CHECK(cfg.at("state").at("kind") == "edge-two-cell");
    CHECK(cfg.at("evolve").at("t_final").get<double>() == 1.0);
  }
  SECTION("interior preset") {
    TempDir dir;
    REQUIRE(run_cli({"evolve", "--preset", "inner-confinement", "--t-final", "1",
                     "--formats", "json", "--out", dir.str()}) == 0);
    const nlohmann::json summary = read_json(dir.file("summary.json"));
    CHECK(summary.at("support_cells") == nlohmann::json({4, 5, 6}));
    CHECK(summary.at("max_intensity_outside_support").get<double>() <= 1e-8);
    CHECK_FALSE(fs::exists(dir.file("trajectory.csv")));
  }
  SECTION("unknown preset") {
    TempDir dir;
    CHECK(run_cli({"evolve", "--preset", "sideways", "--out", dir.str()}) == 2);
  }
}

TEST_CASE("runaway amplification exits with the numerical-failure code") {
  TempDir dir;
  const int rc = run_cli({"evolve", "--gamma", "5", "--v", "0.1", "--J", "1",
                          "--phi", "pi/2", "--r", "1", "--cells", "3", "--boundary",
                          "periodic", "--state", "inner", "--center", "2",
                          "--t-final", "100", "--stride", "100", "--formats",
                          "json", "--out", dir.str()});
  CHECK(rc == 3);
  const nlohmann::json summary = read_json(dir.file("summary.json"));
  CHECK(summary.at("overflow_truncated").get<bool>());
  CHECK(summary.at("final_time").get<double>() < 100.0);
}

TEST_CASE("parameter sweeps") {
  const std::vector<std::string> lattice = {"--J", "1", "--phi", "pi/2",
                                            "--v", "1.5", "--nk", "51"};
  SECTION("one axis") {
    TempDir dir;
    std::vector<std::string> args = {"sweep", "--vary", "gamma=0:1:5",
                                     "--out", dir.str()};
    args.insert(args.end(), lattice.begin(), lattice.end());
    REQUIRE(run_cli(args) == 0);
    const auto lines = lines_of(read_file(dir.file("sweep.csv")));
    REQUIRE(lines.size() == 1 + 5);
    CHECK(lines[0] ==
          "index,gamma,max_im,flat_deviation,fb_residual,ep_count,spectrum_real");
    const double gammas[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 5; ++i) {
      const auto f = fields_of(lines[1 + i]);
      REQUIRE(f.size() == 7);
      CHECK(f[0] == std::to_string(i));
      CHECK(std::stod(f[1]) == gammas[i]);
    }
    CHECK(std::stod(fields_of(lines[1])[4]) == 1.0);
    CHECK(std::stod(fields_of(lines[5])[4]) <= 1e-12);
  }
  SECTION("two axes scan row-major") {
    TempDir dir;
    REQUIRE(run_cli({"sweep", "--vary", "gamma=0:1:3", "--vary", "v=1:2:2", "--J",
                     "0.5", "--phi", "pi/3", "--nk", "21", "--out", dir.str()}) == 0);
    const auto lines = lines_of(read_file(dir.file("sweep.csv")));
    REQUIRE(lines.size() == 1 + 6);
    CHECK(lines[0] ==
          "index,gamma,v,max_im,flat_deviation,fb_residual,ep_count,spectrum_real");
    const auto row3 = fields_of(lines[4]);
    CHECK(row3[0] == "3");
    CHECK(std::stod(row3[1]) == 0.5);
    CHECK(std::stod(row3[2]) == 2.0);
  }
  SECTION("worker count does not change the bytes") {
    TempDir a, b;
    std::vector<std::string> run_a = {"sweep", "--vary", "gamma=0:1:5",
                                      "--out", a.str()};
    std::vector<std::string> run_b = {"sweep", "--vary", "gamma=0:1:5",
                                      "--out", b.str()};
    run_a.insert(run_a.end(), lattice.begin(), lattice.end());
    run_b.insert(run_b.end(), lattice.begin(), lattice.end());
    {
      EnvGuard env("FLUXBAND_WORKERS", "1");
      REQUIRE(run_cli(run_a) == 0);
    }
    {
      EnvGuard env("FLUXBAND_WORKERS", "3");
      REQUIRE(run_cli(run_b) == 0);
    }
    CHECK(read_file(a.file("sweep.csv")) == read_file(b.file("sweep.csv")));
  }
  SECTION("a failing point aborts with partial results") {
    TempDir dir;
    EnvGuard env("FLUXBAND_WORKERS", "1");
    CHECK(run_cli({"sweep", "--vary", "r=-1:1:3", "--nk", "11", "--out",
                   dir.str()}) == 3);
    const auto lines = lines_of(read_file(dir.file("sweep.csv")));
    REQUIRE(lines.size() >= 1);
    CHECK(lines[0] ==
          "index,r,max_im,flat_deviation,fb_residual,ep_count,spectrum_real");
  }
  SECTION("malformed axis specs") {
    TempDir dir;
    CHECK(run_cli({"sweep", "--out", dir.str()}) == 2);
    CHECK(run_cli({"sweep", "--vary", "gamma=0:1", "--out", dir.str()}) == 2);
    CHECK(run_cli({"sweep", "--vary", "volume=0:1:3", "--out", dir.str()}) == 2);
  }
}

TEST_CASE("argument failures use the configuration exit code") {
  TempDir dir;
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"bands", "--gamma", "abc", "--out", dir.str()}) == 2);
  CHECK(run_cli({"bands", "--gamma", "fb", "--J", "1", "--phi", "-pi/4", "--out",
                 dir.str()}) == 2);
  CHECK(run_cli({"bands", "--phi", "2pi3", "--out", dir.str()}) == 2);
  CHECK(run_cli({"bands", "--nk", "1", "--out", dir.str()}) == 2);
  CHECK(run_cli({"bands", "--formats", "csv,xml", "--out", dir.str()}) == 2);
}

TEST_CASE("format selection prunes outputs") {
  TempDir dir;
  REQUIRE(run_cli({"bands", "--formats", "csv", "--nk", "21", "--out", dir.str()}) == 0);
  CHECK(fs::exists(dir.file("bands.csv")));
  CHECK(fs::exists(dir.file("config.json")));
  CHECK_FALSE(fs::exists(dir.file("bands.svg")));
}

TEST_CASE("help paths succeed") {
  CHECK(run_cli({}) == 0);
  CHECK(run_cli({"--help"}) == 0);
}
