#include <doctest.h>

#include <fstream>

#include "core/error.hpp"
#include "core/matrix.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace deepvox;

namespace {

SampleMatrix make(std::initializer_list<std::initializer_list<double>> rows) {
  SampleMatrix m;
  auto r = static_cast<int64_t>(rows.size());
  auto c = static_cast<int64_t>(rows.begin()->size());
  m.values.resize(r, c);
  int64_t i = 0;
  for (const auto& row : rows) {
    int64_t j = 0;
    for (double v : row) m.values(i, j++) = v;
    ++i;
  }
  return m;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("save/load round trip preserves values and shape") {
  TempDir tmp;
  SampleMatrix m = make({{1.0, -2.5, 3.25}, {0.0, 7.5, -0.125}});
  save_matrix(m, tmp.path("m.dvm"));
  SampleMatrix back = load_matrix(tmp.path("m.dvm"));
  CHECK(back.rows() == 2);
  CHECK(back.cols() == 3);
  CHECK(back.values == m.values);
  CHECK(!back.geometry.has_value());
}

TEST_CASE("load then save is byte-identical") {
  TempDir tmp;
  Rng rng(7);
  SampleMatrix m;
  m.values.resize(5, 9);
  for (int64_t i = 0; i < m.values.size(); ++i) m.values.data()[i] = rng.normal();
  save_matrix(m, tmp.path("a.dvm"));
  SampleMatrix loaded = load_matrix(tmp.path("a.dvm"));
  save_matrix(loaded, tmp.path("b.dvm"));
  CHECK(slurp(tmp.path("a.dvm")) == slurp(tmp.path("b.dvm")));
}

TEST_CASE("geometry survives the round trip") {
  TempDir tmp;
  SampleMatrix m = make({{1.0, 2.0, 3.0}});
  m.geometry = VolumeGeometry{{2, 2, 1}, {0, 2, 3}};
  save_matrix(m, tmp.path("g.dvm"));
  SampleMatrix back = load_matrix(tmp.path("g.dvm"));
  REQUIRE(back.geometry.has_value());
  CHECK(back.geometry->dims == std::array<int64_t, 3>{2, 2, 1});
  CHECK(back.geometry->mask == std::vector<int64_t>{0, 2, 3});
}

TEST_CASE("1x1 matrix round trips") {
  TempDir tmp;
  SampleMatrix m = make({{3.5}});
  save_matrix(m, tmp.path("s.dvm"));
  CHECK(load_matrix(tmp.path("s.dvm")).values(0, 0) == 3.5);
}

TEST_CASE("load errors are distinct") {
  TempDir tmp;
  SampleMatrix m = make({{1.0, 2.0}, {3.0, 4.0}});
  save_matrix(m, tmp.path("ok.dvm"));

  SUBCASE("missing file") {
    try {
      load_matrix(tmp.path("nope.dvm"));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
    }
  }
  SUBCASE("malformed header") {
    std::ofstream out(tmp.path("bad.dvm"), std::ios::binary);
    out << "NOPE 1\nrows 2\n";
    out.close();
    try {
      load_matrix(tmp.path("bad.dvm"));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::format);
    }
  }
  SUBCASE("truncated payload") {
    std::string bytes = slurp(tmp.path("ok.dvm"));
    std::ofstream out(tmp.path("trunc.dvm"), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 5));
    out.close();
    try {
      load_matrix(tmp.path("trunc.dvm"));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::size_mismatch);
    }
  }
  SUBCASE("trailing bytes") {
    std::string bytes = slurp(tmp.path("ok.dvm"));
    bytes += "xx";
    std::ofstream out(tmp.path("long.dvm"), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    try {
      load_matrix(tmp.path("long.dvm"));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::size_mismatch);
    }
  }
  SUBCASE("non-finite payload") {
    SampleMatrix bad = make({{1.0}});
    bad.values(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(save_matrix(bad, tmp.path("nan.dvm")), Error);
  }
  SUBCASE("unwritable path") {
    try {
      save_matrix(m, "/nonexistent_dir_zzz/x.dvm");
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
    }
  }
}

TEST_CASE("mask_below_mean keeps columns at or above the grand mean") {
  SUBCASE("2x2 example") {
    auto res = mask_below_mean(make({{0.0, 10.0}, {0.0, 10.0}}));
    CHECK(res.retained == std::vector<int64_t>{1});
    CHECK(res.matrix.cols() == 1);
    CHECK(res.matrix.values(0, 0) == 10.0);
  }
  SUBCASE("constant matrix keeps everything") {
    auto res = mask_below_mean(make({{4.0, 4.0, 4.0}, {4.0, 4.0, 4.0}}));
    CHECK(res.retained == std::vector<int64_t>{0, 1, 2});
  }
  SUBCASE("1x3 example") {
    auto res = mask_below_mean(make({{1.0, 2.0, 9.0}}));
    CHECK(res.retained == std::vector<int64_t>{2});
  }
  SUBCASE("geometry mask composes") {
    SampleMatrix m = make({{0.0, 10.0}, {0.0, 10.0}});
    m.geometry = VolumeGeometry{{3, 1, 1}, {0, 2}};
    auto res = mask_below_mean(m);
    REQUIRE(res.matrix.geometry.has_value());
    CHECK(res.matrix.geometry->mask == std::vector<int64_t>{2});
  }
  SUBCASE("retained set is stable under reapplication") {
    Rng rng(3);
    SampleMatrix m;
    m.values.resize(20, 30);
    for (int64_t i = 0; i < m.values.size(); ++i) m.values.data()[i] = rng.normal() + 1.0;
    auto once = mask_below_mean(m);
    auto twice = mask_below_mean(once.matrix);
    bool identity = twice.retained.size() == static_cast<size_t>(once.matrix.cols());
    // the retained set can only shrink if the grand mean shifted; either way
    // column means of the survivors still clear the new grand mean
    CHECK(identity);
  }
}

TEST_CASE("remove_mean_image zeroes column means") {
  SUBCASE("two-row column") {
    SampleMatrix out = remove_mean_image(make({{1.0}, {3.0}}));
    CHECK(out.values(0, 0) == -1.0);
    CHECK(out.values(1, 0) == 1.0);
  }
  SUBCASE("idempotent on zero-mean input") {
    SampleMatrix m = make({{-1.0, 2.0}, {1.0, -2.0}});
    CHECK(remove_mean_image(m).values == m.values);
  }
  SUBCASE("single row becomes zeros") {
    CHECK(remove_mean_image(make({{5.0, -3.0}})).values.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zscore_voxels normalizes columns") {
  SUBCASE("two-point column") {
    SampleMatrix out = zscore_voxels(make({{0.0}, {2.0}}));
    CHECK(out.values(0, 0) == doctest::Approx(-1.0));
    CHECK(out.values(1, 0) == doctest::Approx(1.0));
  }
  SUBCASE("constant column becomes zeros") {
    SampleMatrix out = zscore_voxels(make({{5.0}, {5.0}, {5.0}}));
    CHECK(out.values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random input lands on mean 0, sd 1") {
    Rng rng(11);
    SampleMatrix m;
    m.values.resize(50, 8);
    for (int64_t i = 0; i < m.values.size(); ++i) m.values.data()[i] = 3.0 * rng.normal() + 2.0;
    SampleMatrix out = zscore_voxels(m);
    for (int64_t j = 0; j < out.cols(); ++j) {
      CHECK(std::abs(out.values.col(j).mean()) <= 1e-10);
      double sd = std::sqrt(out.values.col(j).squaredNorm() / static_cast<double>(out.rows()));
      CHECK(std::abs(sd - 1.0) <= 1e-10);
    }
  }
  SUBCASE("single row rejected") {
    CHECK_THROWS_AS(zscore_voxels(make({{1.0, 2.0}})), Error);
  }
}
