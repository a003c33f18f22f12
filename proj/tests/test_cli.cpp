// End-to-end checks of the installed binary; the path arrives via the
// MNPCA_CLI environment variable set by CMake.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mnpca/io.hpp"

using namespace mnpca;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("MNPCA_CLI");
  REQUIRE_MESSAGE(env != nullptr, "MNPCA_CLI must point at the binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mnpca_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("generate writes the full contract and is deterministic") {
  TempDir tmp;
  const std::string base = "generate --n 60 --p 50 --c1 8 --c2 8";
  REQUIRE(run(base + " --seed 7 --out " + (tmp / "a")) == 0);
  REQUIRE(run(base + " --seed 7 --out " + (tmp / "b")) == 0);
  for (const char* f : {"Y.csv", "M.csv", "labels.csv", "omega_inv.edges",
                        "sigma_inv.edges", "manifest.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(tmp.path / "a" / f));
  }
  for (const char* f : {"Y.csv", "M.csv", "labels.csv", "omega_inv.edges",
                        "sigma_inv.edges"}) {
    CAPTURE(f);
    CHECK(io::file_digest(tmp.path / "a" / f) ==
          io::file_digest(tmp.path / "b" / f));
  }
  const Matrix y = io::read_matrix_csv(tmp.path / "a" / "Y.csv");
  CHECK(y.rows() == 60);
  CHECK(y.cols() == 50);
  // different seed, different data
  REQUIRE(run(base + " --seed 8 --out " + (tmp / "c")) == 0);
  CHECK(io::file_digest(tmp.path / "a" / "Y.csv") !=
        io::file_digest(tmp.path / "c" / "Y.csv"));
}

TEST_CASE("generate validates the spec") {
  TempDir tmp;
  CHECK(run("generate --c1 0.5 --out " + (tmp / "x")) == 2);
  CHECK(run("generate --alpha1 1.5 --out " + (tmp / "x")) == 2);
  std::ofstream(tmp.path / "bad.json") << "{ not json";
  CHECK(run("generate --spec " + (tmp / "bad.json") + " --out " +
            (tmp / "x")) == 2);
  std::ofstream(tmp.path / "spec.json") << R"({"n": 30, "p": 44, "seed": 3})";
  REQUIRE(run("generate --spec " + (tmp / "spec.json") + " --out " +
              (tmp / "ok")) == 0);
  CHECK(io::read_matrix_csv(tmp.path / "ok" / "Y.csv").rows() == 30);
}

TEST_CASE("fit writes the contract and validates input") {
  TempDir tmp;
  REQUIRE(run("generate --n 40 --p 44 --c1 1 --c2 1 --alpha1 0 --alpha2 0 "
              "--seed 1 --out " +
              (tmp / "data")) == 0);
  const std::string y = (tmp.path / "data" / "Y.csv").string();

  REQUIRE(run("fit " + y + " --algo mrl --lambda1 0.1 --lambda2 0.1 "
              "--max-iter 5 --out " + (tmp / "fit")) == 0);
  for (const char* f : {"X.csv", "W.csv", "M_hat.csv", "omega_inv.edges",
                        "sigma_inv.edges", "trace.csv", "manifest.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(tmp.path / "fit" / f));
  }
  const Matrix trace = io::read_matrix_csv(tmp.path / "fit" / "trace.csv");
  for (int i = 1; i < trace.rows(); ++i)
    CHECK(trace(i, 0) <= trace(i - 1, 0) + 1e-8);

  CHECK(run("fit " + y + " --rank 0 --out " + (tmp / "bad")) == 2);
  CHECK(run("fit " + y + " --lambda1 nonsense --out " + (tmp / "bad")) == 2);
  CHECK(run("fit " + (tmp / "missing.csv") + " --out " + (tmp / "bad")) == 2);
  std::ofstream(tmp.path / "ragged.csv") << "1,2\n3\n";
  CHECK(run("fit " + (tmp / "ragged.csv") + " --out " + (tmp / "bad")) == 2);
}

TEST_CASE("fit is deterministic for a fixed seed") {
  TempDir tmp;
  REQUIRE(run("generate --n 44 --p 40 --c1 4 --c2 4 --seed 2 --out " +
              (tmp / "data")) == 0);
  const std::string y = (tmp.path / "data" / "Y.csv").string();
  const std::string flags =
      " --algo w2 --max-iter 4 --seed 5 --out ";
  REQUIRE(run("fit " + y + flags + (tmp / "f1")) == 0);
  REQUIRE(run("fit " + y + flags + (tmp / "f2")) == 0);
  for (const char* f : {"X.csv", "W.csv", "M_hat.csv", "omega_inv.edges",
                        "sigma_inv.edges", "trace.csv"}) {
    CAPTURE(f);
    CHECK(io::file_digest(tmp.path / "f1" / f) ==
          io::file_digest(tmp.path / "f2" / f));
  }
}

TEST_CASE("eval round trip on a perfect-recovery fixture") {
  TempDir tmp;
  REQUIRE(run("generate --n 40 --p 44 --c1 1 --c2 1 --alpha1 0 --alpha2 0 "
              "--seed 4 --out " +
              (tmp / "truth")) == 0);
  // Hand-build a "fit" that reproduces the truth exactly: M_hat = M and a
  // trivially separable score matrix (one coordinate per label).
  fs::create_directories(tmp.path / "fit");
  fs::copy_file(tmp.path / "truth" / "M.csv", tmp.path / "fit" / "M_hat.csv");
  const auto labels = io::read_labels_csv(tmp.path / "truth" / "labels.csv");
  Matrix x = Matrix::Zero(static_cast<int>(labels.size()), 2);
  for (std::size_t i = 0; i < labels.size(); ++i)
    x(static_cast<int>(i), 0) = 10.0 * labels[i];
  io::write_matrix_csv(tmp.path / "fit" / "X.csv", x);

  REQUIRE(run("eval " + (tmp / "fit") + " " + (tmp.path / "truth").string()) ==
          0);
  std::ifstream report(tmp.path / "fit" / "report.json");
  REQUIRE(report.good());
  std::stringstream ss;
  ss << report.rdbuf();
  const std::string text = ss.str();
  CHECK(text.find("\"rmse\": 0.0") != std::string::npos);
  CHECK(text.find("\"nmi\": 100.0") != std::string::npos);

  CHECK(run("eval " + (tmp / "nothing") + " " +
            (tmp.path / "truth").string()) == 2);
}

TEST_CASE("select-rank and select-lambda print sane choices") {
  TempDir tmp;
  REQUIRE(run("generate --n 60 --p 50 --c1 1 --c2 1 --alpha1 0 --alpha2 0 "
              "--seed 6 --out " +
              (tmp / "data")) == 0);
  const std::string y = (tmp.path / "data" / "Y.csv").string();
  REQUIRE(run("select-rank " + y + " --json " + (tmp / "rank.json")) == 0);
  CHECK(fs::exists(tmp.path / "rank.json"));
  REQUIRE(run("select-lambda " + y + " --json " + (tmp / "lambda.json")) == 0);
  CHECK(fs::exists(tmp.path / "lambda.json"));
}

TEST_CASE("standalone glasso emits an edge list") {
  TempDir tmp;
  Matrix s(3, 3);
  s << 2.0, 0.8, 0.0, 0.8, 2.0, 0.8, 0.0, 0.8, 2.0;
  io::write_matrix_csv(tmp.path / "S.csv", s);
  REQUIRE(run("glasso " + (tmp / "S.csv") + " --rho 0.1 --out " +
              (tmp / "theta.edges")) == 0);
  SparseSymmetric theta = io::read_edges(tmp.path / "theta.edges");
  CHECK(theta.dim == 3);
  CHECK(theta.nnz_offdiag() >= 1);

  Matrix bad(2, 3);
  bad.setZero();
  io::write_matrix_csv(tmp.path / "bad.csv", bad);
  CHECK(run("glasso " + (tmp / "bad.csv")) == 2);
}

TEST_SUITE_END();
