#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpspectra/matrix_market.hpp"

using namespace dpspectra;

namespace {

IngestResult ingest_string_mm(const std::string& text) {
  std::istringstream in(text);
  return ingest_matrix_market(in);
}

IngestResult ingest_string_csv(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in);
}

}  // namespace

TEST_CASE("matrix market array format") {
  SECTION("2x2 identity, general tag, detected symmetric") {
    const auto res = ingest_string_mm(
        "%%MatrixMarket matrix array real general\n"
        "2 2\n1.0\n0.0\n0.0\n1.0\n");
    CHECK(res.symmetric);
    CHECK(res.format == "matrix-market-array");
    const auto& A = res.as_symmetric();
    CHECK(A(0, 0) == 1.0);
    CHECK(A(0, 1) == 0.0);
  }
  SECTION("symmetric tag stores the lower triangle") {
    const auto res = ingest_string_mm(
        "%%MatrixMarket matrix array real symmetric\n"
        "% comment line\n"
        "2 2\n1.0\n2.0\n3.0\n");
    CHECK(res.symmetric);
    const auto& A = res.as_symmetric();
    CHECK(A(0, 0) == 1.0);
    CHECK(A(1, 0) == 2.0);
    CHECK(A(0, 1) == 2.0);
    CHECK(A(1, 1) == 3.0);
  }
}

TEST_CASE("matrix market coordinate format") {
  SECTION("asymmetric square routes to the dilation path") {
    const auto res = ingest_string_mm(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 1\n"
        "1 2 3.0\n");
    CHECK_FALSE(res.symmetric);
    const auto& R = res.as_rect();
    CHECK(R(0, 1) == 3.0);
    CHECK(R(1, 0) == 0.0);
  }
  SECTION("symmetric tag mirrors entries exactly") {
    const auto res = ingest_string_mm(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "3 3 2\n"
        "2 1 5.0\n"
        "3 3 1.0\n");
    CHECK(res.symmetric);
    const auto& A = res.as_symmetric();
    CHECK(A(0, 1) == 5.0);
    CHECK(A(1, 0) == 5.0);
    CHECK(A(2, 2) == 1.0);
  }
  SECTION("upper-triangular entry under symmetric tag is rejected") {
    CHECK_THROWS_AS(ingest_string_mm("%%MatrixMarket matrix coordinate real symmetric\n"
                                     "2 2 1\n"
                                     "1 2 3.0\n"),
                    ParseError);
  }
  SECTION("duplicate entries rejected") {
    CHECK_THROWS_AS(ingest_string_mm("%%MatrixMarket matrix coordinate real general\n"
                                     "2 2 2\n"
                                     "1 1 1.0\n"
                                     "1 1 2.0\n"),
                    ParseError);
  }
  SECTION("rectangular coordinate file") {
    const auto res = ingest_string_mm(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 3 2\n"
        "1 1 1.0\n"
        "2 3 -2.0\n");
    CHECK_FALSE(res.symmetric);
    CHECK(res.as_rect().rows() == 2);
    CHECK(res.as_rect().cols() == 3);
  }
}

TEST_CASE("validation failures carry diagnostics") {
  SECTION("inf token rejected") {
    CHECK_THROWS_WITH(ingest_string_mm("%%MatrixMarket matrix array real general\n"
                                       "2 2\n1.0\ninf\n0.0\n1.0\n"),
                      Catch::Matchers::ContainsSubstring("non-finite"));
  }
  SECTION("nan rejected in csv") {
    CHECK_THROWS_WITH(ingest_string_csv("1.0,nan\n0.0,1.0\n"),
                      Catch::Matchers::ContainsSubstring("non-finite"));
  }
  SECTION("bad banner") {
    CHECK_THROWS_AS(ingest_string_mm("%%NotMM\n1 1\n1.0\n"), ParseError);
  }
  SECTION("parse error reports the line") {
    CHECK_THROWS_WITH(ingest_string_mm("%%MatrixMarket matrix coordinate real general\n"
                                       "2 2 1\n"
                                       "1 x 3.0\n"),
                      Catch::Matchers::ContainsSubstring("line 3"));
  }
  SECTION("index out of range") {
    CHECK_THROWS_AS(ingest_string_mm("%%MatrixMarket matrix coordinate real general\n"
                                     "2 2 1\n"
                                     "5 1 3.0\n"),
                    ParseError);
  }
}

TEST_CASE("csv ingestion") {
  SECTION("square symmetric csv becomes SymmetricMatrix") {
    const auto res = ingest_string_csv("1.0, 2.0\n2.0, 5.0\n");
    CHECK(res.symmetric);
    CHECK(res.as_symmetric()(0, 1) == 2.0);
  }
  SECTION("asymmetric csv stays rectangular") {
    const auto res = ingest_string_csv("1.0,2.0\n3.0,4.0\n");
    CHECK_FALSE(res.symmetric);
  }
  SECTION("ragged rows rejected") {
    CHECK_THROWS_AS(ingest_string_csv("1.0,2.0\n3.0\n"), ParseError);
  }
}

TEST_CASE("ingest_path dispatches by extension and tag") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "dpspectra_ingest_test";
  fs::create_directories(dir);
  const auto mm = dir / "a.mtx";
  {
    std::ofstream out(mm);
    out << "%%MatrixMarket matrix array real general\n2 2\n1.0\n0.0\n0.0\n1.0\n";
  }
  const auto res = ingest_path(mm.string());
  CHECK(res.symmetric);
  const auto csv = dir / "b.csv";
  {
    std::ofstream out(csv);
    out << "1.0,0.0\n0.0,1.0\n";
  }
  const auto res2 = ingest_path(csv.string());
  CHECK(res2.symmetric);
  CHECK_THROWS_AS(ingest_path((dir / "missing.mtx").string()), ParseError);
  fs::remove_all(dir);
}
