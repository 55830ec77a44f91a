#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "modref/dataio/flo.hpp"
#include "modref/dataio/manifest.hpp"
#include "modref/dataio/pfm.hpp"
#include "modref/dataio/pnm.hpp"
#include "modref/dataio/report.hpp"

using namespace modref;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  fs::path p = fs::temp_directory_path() / "modref_dataio_test";
  fs::create_directories(p);
  return p;
}

dataio::Manifest small_manifest() {
  dataio::Manifest m;
  m.rng_seed = 42;
  m.class_palette = {{0, "sky", {135, 206, 235}}, {1, "grass", {60, 140, 50}}};
  dataio::SceneEntry s;
  s.scene_id = 0;
  s.lighting_preset = "clear";
  s.frame_count = 2;
  s.intrinsics = {55.4, 32.0, 32.0};
  s.poses.resize(2);
  s.poses[1].t = {0.25, 1.5, -0.125};
  m.scenes.push_back(s);
  return m;
}

}  // namespace

TEST_CASE("flo: 1x1 flow writes a 20-byte file and round-trips") {
  FlowField f(1, 1);
  f.u(0, 0) = 3.0f;
  f.v(0, 0) = -4.0f;
  fs::path p = tmp_dir() / "tiny.flo";
  dataio::write_flo(f, p);
  CHECK(fs::file_size(p) == 20);
  CHECK(dataio::read_flo(p) == f);
}

TEST_CASE("flo: unknown sentinel values round-trip unchanged") {
  FlowField f(2, 1);
  f.u(1, 0) = 1e10f;
  f.v(1, 0) = 1e10f;
  fs::path p = tmp_dir() / "sentinel.flo";
  dataio::write_flo(f, p);
  CHECK(dataio::read_flo(p) == f);
}

TEST_CASE("flo: bad magic is a format error") {
  fs::path p = tmp_dir() / "badmagic.flo";
  std::ofstream out(p, std::ios::binary);
  float zero = 0.0f;
  int32_t one = 1;
  out.write(reinterpret_cast<const char*>(&zero), 4);
  out.write(reinterpret_cast<const char*>(&one), 4);
  out.write(reinterpret_cast<const char*>(&one), 4);
  float uv[2] = {0, 0};
  out.write(reinterpret_cast<const char*>(uv), 8);
  out.close();
  CHECK_THROWS_AS(dataio::read_flo(p), FormatError);
}

TEST_CASE("flo: truncated payload is a length error") {
  FlowField f(4, 4);
  fs::path p = tmp_dir() / "trunc.flo";
  dataio::write_flo(f, p);
  fs::resize_file(p, fs::file_size(p) - 5);
  CHECK_THROWS_AS(dataio::read_flo(p), LengthError);
}

TEST_CASE("flo: randomized round-trip is bit exact, file size 12+8WH") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 23);
  std::uniform_real_distribution<float> val(-50.0f, 50.0f);
  for (int it = 0; it < 25; ++it) {
    FlowField f(dim(rng), dim(rng));
    for (float& x : f.data) x = val(rng);
    if (it % 3 == 0) f.data[0] = 2e9f;  // sprinkle the unknown sentinel
    fs::path p = tmp_dir() / "rand.flo";
    dataio::write_flo(f, p);
    CHECK(fs::file_size(p) == 12 + 8 * static_cast<uintmax_t>(f.width) * f.height);
    CHECK(dataio::read_flo(p) == f);
  }
}

TEST_CASE("pfm: constant depth map round-trips") {
  DepthMap d(4, 4, 10.0f);
  fs::path p = tmp_dir() / "depth.pfm";
  dataio::write_pfm(d, p);
  CHECK(dataio::read_pfm_depth(p) == d);
}

TEST_CASE("pfm: constant normal map round-trips") {
  NormalMap n(3, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) n.at(x, y)[2] = -1.0f;
  fs::path p = tmp_dir() / "norm.pfm";
  dataio::write_pfm(n, p);
  CHECK(dataio::read_pfm_normals(p) == n);
}

TEST_CASE("pfm: NaN input is a validation error") {
  DepthMap d(2, 2, 1.0f);
  d.at(0, 1) = std::nanf("");
  CHECK_THROWS_AS(dataio::write_pfm(d, tmp_dir() / "nan.pfm"), ValidationError);
}

TEST_CASE("pfm: P5 header is a format error") {
  fs::path p = tmp_dir() / "p5.pfm";
  std::ofstream out(p, std::ios::binary);
  out << "P5\n2 2\n255\n";
  out.write("\0\0\0\0", 4);
  out.close();
  CHECK_THROWS_AS(dataio::read_pfm_depth(p), FormatError);
}

TEST_CASE("pfm: randomized round-trip is bit exact") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 17);
  std::uniform_real_distribution<float> val(-1e6f, 1e6f);
  for (int it = 0; it < 20; ++it) {
    DepthMap d(dim(rng), dim(rng));
    for (float& x : d.data) x = val(rng);
    fs::path p = tmp_dir() / "rand_d.pfm";
    dataio::write_pfm(d, p);
    CHECK(dataio::read_pfm_depth(p) == d);

    NormalMap n(dim(rng), dim(rng));
    for (float& x : n.data) x = val(rng);
    fs::path q = tmp_dir() / "rand_n.pfm";
    dataio::write_pfm(n, q);
    CHECK(dataio::read_pfm_normals(q) == n);
  }
}

TEST_CASE("pnm: rgb image round-trips") {
  Rgb8Image img(2, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      img.at(x, y)[0] = 128;
      img.at(x, y)[1] = 64;
      img.at(x, y)[2] = 32;
    }
  fs::path p = tmp_dir() / "img.ppm";
  dataio::write_pnm(img, p);
  CHECK(dataio::read_ppm(p) == img);
}

TEST_CASE("pnm: label map round-trips through P5") {
  LabelMap l(2, 2);
  l.at(0, 0) = 0;
  l.at(1, 0) = 1;
  l.at(0, 1) = 2;
  l.at(1, 1) = 3;
  fs::path p = tmp_dir() / "labels.pgm";
  dataio::write_pnm(l, p);
  CHECK(to_label_map(dataio::read_pgm(p)) == l);
}

TEST_CASE("pnm: label 300 is a range error") {
  LabelMap l(1, 1);
  l.at(0, 0) = 300;
  CHECK_THROWS_AS(dataio::write_pnm(l, tmp_dir() / "bad.pgm"), RangeError);
}

TEST_CASE("pnm: randomized round-trip") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dim(1, 19);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int it = 0; it < 20; ++it) {
    Rgb8Image img(dim(rng), dim(rng));
    for (uint8_t& b : img.data) b = static_cast<uint8_t>(byte(rng));
    fs::path p = tmp_dir() / "rand.ppm";
    dataio::write_pnm(img, p);
    CHECK(dataio::read_ppm(p) == img);

    GrayImage g(dim(rng), dim(rng));
    for (uint8_t& b : g.data) b = static_cast<uint8_t>(byte(rng));
    fs::path q = tmp_dir() / "rand.pgm";
    dataio::write_pnm(g, q);
    CHECK(dataio::read_pgm(q) == g);
  }
}

TEST_CASE("manifest: round-trip equality on all fields") {
  dataio::Manifest m = small_manifest();
  fs::path p = tmp_dir() / "manifest.json";
  dataio::write_manifest(m, p);
  CHECK(dataio::read_manifest(p) == m);
}

TEST_CASE("manifest: non-orthonormal rotation rejected") {
  dataio::Manifest m = small_manifest();
  m.scenes[0].poses[0].r[0] = 1.01;  // 1e-2 orthonormality error
  CHECK_THROWS_AS(dataio::validate_manifest(m), ValidationError);
  CHECK_THROWS_AS(dataio::write_manifest(m, tmp_dir() / "bad.json"), ValidationError);
}

TEST_CASE("manifest: frame_count below 2 rejected") {
  dataio::Manifest m = small_manifest();
  m.scenes[0].frame_count = 1;
  m.scenes[0].poses.resize(1);
  CHECK_THROWS_AS(dataio::validate_manifest(m), ValidationError);
}

TEST_CASE("manifest: non-contiguous class ids rejected") {
  dataio::Manifest m = small_manifest();
  m.class_palette[1].class_id = 5;
  CHECK_THROWS_AS(dataio::validate_manifest(m), ValidationError);
}

TEST_CASE("manifest: schema version mismatch is a version error") {
  dataio::Manifest m = small_manifest();
  fs::path p = tmp_dir() / "ver.json";
  dataio::write_manifest(m, p);
  // patch the version field on disk
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  auto pos = text.find("\"schema_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "\"schema_version\": 9");
  std::ofstream out(p);
  out << text;
  out.close();
  CHECK_THROWS_AS(dataio::read_manifest(p), VersionError);
}

TEST_CASE("report: normal-metric column set renders all six headers") {
  dataio::ReportTable t;
  t.title = "normals refinement";
  t.columns = {{"mean", dataio::MetricDirection::kLower},
               {"median", dataio::MetricDirection::kLower},
               {"rmse", dataio::MetricDirection::kLower},
               {"11.25", dataio::MetricDirection::kHigher},
               {"22.5", dataio::MetricDirection::kHigher},
               {"30", dataio::MetricDirection::kHigher}};
  t.rows = {{"baseline", {10.0, 8.0, 14.0, 60.0, 88.0, 97.0}}};
  std::string plain = dataio::render_report(t, dataio::ReportFormat::kPlain);
  for (const char* h : {"mean", "median", "rmse", "11.25", "22.5", "30"})
    CHECK(plain.find(h) != std::string::npos);
  std::string csv = dataio::render_report(t, dataio::ReportFormat::kDelimited);
  CHECK(csv.find("config,mean,median,rmse,11.25,22.5,30") != std::string::npos);
  CHECK(csv.find("# direction,lower,lower,lower,higher,higher,higher") != std::string::npos);
}

TEST_CASE("report: row arity mismatch rejected") {
  dataio::ReportTable t;
  t.title = "bad";
  t.columns = {{"epe", dataio::MetricDirection::kLower}};
  t.rows = {{"row", {1.0, 2.0}}};
  CHECK_THROWS_AS(dataio::render_report(t, dataio::ReportFormat::kPlain), ValidationError);
}

TEST_CASE("report: rendering is deterministic") {
  dataio::ReportTable t;
  t.title = "flow";
  t.header_lines = {"version 0.1.0", "config 0123abcd"};
  t.columns = {{"epe", dataio::MetricDirection::kLower}};
  t.rows = {{"baseline", {2.5}}, {"refined", {1.25}}};
  CHECK(dataio::render_report(t, dataio::ReportFormat::kPlain) ==
        dataio::render_report(t, dataio::ReportFormat::kPlain));
  fs::path p1 = tmp_dir() / "r1.txt", p2 = tmp_dir() / "r2.txt";
  dataio::write_report(t, p1, dataio::ReportFormat::kDelimited);
  dataio::write_report(t, p2, dataio::ReportFormat::kDelimited);
  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
}
