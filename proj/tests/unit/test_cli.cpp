#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "holocorr/cli.hpp"

using namespace holocorr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("holocorr_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
                                        "_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kAnnulus = "z^2; z^2/2";

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run({}).code == cli::parse_failure);
  CHECK(run({"--help"}).code == cli::ok);
  CHECK(run({"measure", "--gens", "z^^2", "--out", dir / "a.csv"}).code == cli::parse_failure);
  CHECK(run({"measure", "--gens", "z^2; z", "--out", dir / "a.csv"}).code == cli::parse_failure);
  CHECK(run({"measure", "--gens", "z^2; adjoint(z^3)", "--method", "tree", "--depth", "2", "--out", dir / "a.csv"})
            .code == cli::condition_failure);
  CHECK(run({"measure", "--gens", kAnnulus, "--method", "tree", "--depth", "6", "--max-atoms", "8", "--out",
             dir / "a.csv"})
            .code == cli::caps_exceeded);
  CHECK(run({"render", "--atoms", dir / "missing.csv", "--out", dir / "a.pgm"}).code == cli::io_failure);
}

TEST_CASE("compose prints the composed curve") {
  const auto r = run({"compose", "--poly", "y - x^2", "--poly", "y - x^2"});
  REQUIRE(r.code == cli::ok);
  CHECK(r.out.find("# dt=4 d0=1") != std::string::npos);
  CHECK(r.out.find("1 y - x^4") != std::string::npos);
}

TEST_CASE("measure, verify and recur on the annulus semigroup") {
  TempDir dir;
  const auto atoms = dir / "tree.csv";
  REQUIRE(run({"measure", "--gens", kAnnulus, "--method", "tree", "--depth", "7", "--out", atoms}).code == cli::ok);

  const auto deg = run({"verify", "--gens", kAnnulus, "--atoms", atoms, "--suite", "degrees"});
  CHECK(deg.code == cli::ok);
  CHECK(deg.out.find("d_t=4 d0=2 condition=true") != std::string::npos);

  // A tolerance no sampled measure can meet must report a verification failure.
  const auto tight = run({"verify", "--gens", kAnnulus, "--atoms", atoms, "--suite", "invariance", "--tol", "1e-300"});
  CHECK(tight.code == cli::verification_failure);
  CHECK(tight.out.find("FAIL") != std::string::npos);

  const auto report = dir / "recur.json";
  const auto rec = run({"recur", "--gens", kAnnulus, "--atoms", atoms, "--region", "annulus 1.2 1.8 closed",
                        "--horizon", "12", "--min-returns", "3", "--points", "20", "--witnesses", "--out", report});
  REQUIRE(rec.code == cli::ok);
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["version"] == cli::kVersion);
  CHECK(doc["config"]["command"] == "recur");
  CHECK_FALSE(doc["config"].contains("workers"));
  CHECK(doc["atoms"].size() == 20);
  CHECK(doc["aggregate"]["certificates_valid"] == doc["aggregate"]["certificates_checked"]);
  CHECK(doc["aggregate"]["chains_valid"] == 20);
}

TEST_CASE("chaos output does not depend on the worker count") {
  TempDir one, three;
  for (const auto* d : {&one, &three}) {
    REQUIRE(run({"measure", "--gens", kAnnulus, "--method", "chaos", "--samples", "5000", "--burn", "20", "--seed",
                 "9", "--workers", d == &one ? "1" : "3", "--out", *d / "mu.csv"})
                .code == cli::ok);
  }
  const auto a = slurp(one / "mu.csv"), b = slurp(three / "mu.csv");
  CHECK(a.find("# config {") != std::string::npos);
  // The config line records the output path.
  const auto body = [](const std::string& s) { return s.substr(s.find("# method=")); };
  CHECK(a.size() > 1000);
  CHECK((body(a) == body(b)));
}

TEST_CASE("render writes a PGM with the top row at the largest imaginary part") {
  TempDir dir;
  const auto atoms = dir / "up.csv";
  {
    std::ofstream f(atoms);
    f << "# holocorr atoms v1\n# total_mass=1\nkind,re,im,weight\naffine,0,1.9,1\n";
  }
  REQUIRE(run({"render", "--atoms", atoms, "--res", "32", "--out", dir / "up.pgm"}).code == cli::ok);
  const auto pgm = slurp(dir / "up.pgm");
  const std::string header = "P5\n32 32\n255\n";
  REQUIRE(pgm.size() == header.size() + 32 * 32);
  CHECK(pgm.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 16]) == 255);
  std::size_t lit = 0;
  for (std::size_t i = header.size(); i < pgm.size(); ++i) lit += pgm[i] != 0;
  CHECK(lit == 1);
}
