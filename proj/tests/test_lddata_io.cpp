#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qmc/dnet.hpp"
#include "qmc/lddata_io.hpp"

using namespace qmc;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("qmc_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("lattice vector: write/read round trip and payload echo") {
  TempDir tmp;
  write_text(tmp.path("g.txt"),
             "# kind: lattice-vector\n# base: 2\n# d: 2\n# m_max: 20\n# source: test\n"
             "1 182667\n");
  auto g = io::read_lattice_vector(tmp.path("g.txt"));
  REQUIRE(g.g == std::vector<std::uint64_t>{1, 182667});
  REQUIRE(g.m_max == 20);
  REQUIRE(g.source == "test");

  auto back = tmp.path("g2.txt");
  io::write_lattice_vector(g, back);
  auto g2 = io::read_lattice_vector(back);
  REQUIRE(g2.g == g.g);
  REQUIRE(g2.m_max == g.m_max);
}

TEST_CASE("lattice vector parse errors carry line numbers") {
  TempDir tmp;
  write_text(tmp.path("empty.txt"), "# kind: lattice-vector\n# d: 1\n# m_max: 10\n");
  REQUIRE_THROWS_AS(io::read_lattice_vector(tmp.path("empty.txt")), parse_error);

  write_text(tmp.path("bad.txt"),
             "# kind: lattice-vector\n# d: 2\n# m_max: 10\n1 two\n");
  try {
    io::read_lattice_vector(tmp.path("bad.txt"));
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    REQUIRE(e.line() == 4);
  }

  write_text(tmp.path("mismatch.txt"),
             "# kind: lattice-vector\n# d: 3\n# m_max: 10\n1 7\n");
  REQUIRE_THROWS_AS(io::read_lattice_vector(tmp.path("mismatch.txt")), parse_error);
}

TEST_CASE("dnet matrices: identity encoding, round trip, range checks") {
  TempDir tmp;
  // identity with t_max = m = 3 encodes columns 4 2 1
  auto I = identity_matrices(1, 3);
  io::write_dnet_matrices(I, tmp.path("I.txt"));
  std::ifstream in(tmp.path("I.txt"));
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(all.find("4 2 1") != std::string::npos);
  auto I2 = io::read_dnet_matrices(tmp.path("I.txt"));
  REQUIRE(I2.cols == I.cols);
  REQUIRE(I2.t_max == 3);

  auto S = sobol_matrices(4, 20);
  io::write_dnet_matrices(S, tmp.path("S.txt"));
  auto S2 = io::read_dnet_matrices(tmp.path("S.txt"));
  REQUIRE(S2.cols == S.cols);

  write_text(tmp.path("range.txt"),
             "# kind: dnet-matrices\n# base: 2\n# d: 1\n# m: 2\n# t_max: 3\n9 1\n");
  REQUIRE_THROWS_AS(io::read_dnet_matrices(tmp.path("range.txt")), std::out_of_range);

  write_text(tmp.path("ragged.txt"),
             "# kind: dnet-matrices\n# base: 2\n# d: 1\n# m: 3\n# t_max: 3\n4 2\n");
  REQUIRE_THROWS_AS(io::read_dnet_matrices(tmp.path("ragged.txt")), parse_error);

  write_text(tmp.path("t0.txt"),
             "# kind: dnet-matrices\n# base: 2\n# d: 1\n# m: 1\n# t_max: 0\n1\n");
  REQUIRE_THROWS_AS(io::read_dnet_matrices(tmp.path("t0.txt")), parse_error);
}

TEST_CASE("point batch: csv shape and binary bit-exact round trip") {
  TempDir tmp;
  PointBatch b;
  b.R = 2;
  b.n = 3;
  b.d = 2;
  b.x = {0.5, 0.25, 0.75, 0.125, 0.0625, 0.3,
         0.9, 0.1, 0.2, 0.8, 0.7, 0.6};

  io::write_point_batch(b, tmp.path("b.csv"), io::BatchFormat::csv);
  auto csv = io::read_point_batch(tmp.path("b.csv"));
  REQUIRE(csv.R == 2);
  REQUIRE(csv.n == 3);
  REQUIRE(csv.d == 2);
  std::ifstream in(tmp.path("b.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  REQUIRE(rows == 6);  // R * n rows with an index column

  io::write_point_batch(b, tmp.path("b.bin"), io::BatchFormat::binary);
  auto bin = io::read_point_batch(tmp.path("b.bin"));
  REQUIRE(bin.R == 2);
  REQUIRE(bin.x == b.x);  // bit exact

  // single value batch: "0,0.5"
  PointBatch one;
  one.R = 1;
  one.n = 1;
  one.d = 1;
  one.x = {0.5};
  io::write_point_batch(one, tmp.path("one.csv"), io::BatchFormat::csv);
  std::ifstream oin(tmp.path("one.csv"));
  std::string first;
  std::getline(oin, first);
  REQUIRE(first == "0,0.5");
}

TEST_CASE("binary reader rejects trailing garbage and truncation") {
  TempDir tmp;
  PointBatch b;
  b.R = 1;
  b.n = 2;
  b.d = 1;
  b.x = {0.25, 0.75};
  io::write_point_batch(b, tmp.path("ok.bin"), io::BatchFormat::binary);

  {
    std::ofstream app(tmp.path("ok.bin"), std::ios::binary | std::ios::app);
    app << "junk";
  }
  REQUIRE_THROWS_AS(io::read_point_batch(tmp.path("ok.bin")), parse_error);

  io::write_point_batch(b, tmp.path("trunc.bin"), io::BatchFormat::binary);
  std::filesystem::resize_file(tmp.path("trunc.bin"), 30);
  REQUIRE_THROWS_AS(io::read_point_batch(tmp.path("trunc.bin")), parse_error);
}

TEST_CASE("best-effort import of bare external layouts") {
  TempDir tmp;
  // bare vector of components
  write_text(tmp.path("bare.txt"), "# a comment without keys\n1\n182667\n469891\n");
  auto g = io::import_lattice_vector(tmp.path("bare.txt"));
  REQUIRE(g.g == std::vector<std::uint64_t>{1, 182667, 469891});
  REQUIRE(g.source == "lddata-import-unverified");

  // (base, n, d) wrapper, one value per line
  write_text(tmp.path("wrapped.txt"), "2\n1048576\n2\n1\n182667\n");
  auto g2 = io::import_lattice_vector(tmp.path("wrapped.txt"));
  REQUIRE(g2.g == std::vector<std::uint64_t>{1, 182667});
  REQUIRE(g2.m_max == 20);

  // native files pass through
  io::write_lattice_vector(g, tmp.path("native.txt"));
  auto g3 = io::import_lattice_vector(tmp.path("native.txt"));
  REQUIRE(g3.g == g.g);
}
