#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ueclab/report.hpp"

using namespace ueclab;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
  return json{
      {"space", {{"indexing", "integer"}, {"dims", {16, 32}}}},
      {"scheme", {{"L", 12}, {"net_depth", 0}, {"seed", 7}}},
      {"family", {{"descriptor", "left_shift_powers"}, {"k_max", 5}}},
      {"analyses", json::array()}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ueclab_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json strip_wall_time(json r) {
  r.erase("wall_time_s");
  return r;
}

}  // namespace

TEST_CASE("sig12 pins doubles to 12 significant digits") {
  CHECK(sig12(1.0) == 1.0);
  CHECK(sig12(0.1234567890123456) == 0.123456789012);
  CHECK(sig12(-3.14159265358979) == -3.14159265359);
  CHECK(sig12(0.0) == 0.0);
  // idempotent: a rounded value survives another pass
  for (double v : {1e-7, 2.0 / 3.0, 123456.789, 5e-324})
    CHECK(sig12(sig12(v)) == sig12(v));
}

TEST_CASE("matrix CSV round-trips at 12 digits") {
  TempDir tmp("matcsv");
  Mat m(2, 3);
  m << Complex(1.25, -0.5), Complex(0, 1), Complex(2.0 / 3.0, 0.1),
      Complex(-1, 0), Complex(0.123456789012345, 7), Complex(0, 0);
  std::string path = (tmp.path / "m.csv").string();
  write_matrix_csv(m, path);
  Mat back = read_matrix_csv(path);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(back(i, j).real() == sig12(m(i, j).real()));
      CHECK(back(i, j).imag() == sig12(m(i, j).imag()));
    }

  // the cells are quoted "re,im"
  std::ifstream is(path);
  std::string first_line;
  std::getline(is, first_line);
  CHECK(first_line.substr(0, 1) == "\"");
  CHECK(first_line.find("\"1.25,-0.5\"") != std::string::npos);

  CHECK_THROWS_AS(read_matrix_csv((tmp.path / "absent.csv").string()),
                  ValidationError);
  std::ofstream((tmp.path / "bad.csv").string()) << "\"1.0\"\n";
  CHECK_THROWS_AS(read_matrix_csv((tmp.path / "bad.csv").string()),
                  ValidationError);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(ExperimentConfig::parse(minimal_config()));

  SUBCASE("ladder must increase") {
    auto doc = minimal_config();
    doc["space"]["dims"] = {32, 16};
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse(doc),
                         "ladder not increasing", ValidationError);
  }
  SUBCASE("dimension cap") {
    auto doc = minimal_config();
    doc["space"]["dims"] = {16, 1024};
    CHECK_THROWS_AS(ExperimentConfig::parse(doc), ValidationError);
  }
  SUBCASE("indexing vocabulary") {
    auto doc = minimal_config();
    doc["space"]["indexing"] = "spiral";
    CHECK_THROWS_AS(ExperimentConfig::parse(doc), ValidationError);
  }
  SUBCASE("missing scheme seed") {
    auto doc = minimal_config();
    doc["scheme"].erase("seed");
    CHECK_THROWS_AS(ExperimentConfig::parse(doc), ValidationError);
  }
  SUBCASE("randomized analyses need explicit seeds") {
    for (std::string type : {"certificate", "modulus", "ec_uec", "composition",
                             "correspondence", "dim_criterion_oracle"}) {
      auto doc = minimal_config();
      doc["analyses"] = json::array({{{"type", type}}});
      CHECK_THROWS_AS(ExperimentConfig::parse(doc), ValidationError);
    }
  }
  SUBCASE("analyses must be an array") {
    auto doc = minimal_config();
    doc["analyses"] = json::object();
    CHECK_THROWS_AS(ExperimentConfig::parse(doc), ValidationError);
  }
}

TEST_CASE("build_family dispatch and contract") {
  BasisIndexing zx{IndexKind::Integer, 33};
  auto fam = build_family(
      json{{"descriptor", "left_shift_powers"}, {"k_max", 3}}, zx);
  CHECK(fam.size() == 3);
  CHECK(fam.members[0].first == "S^1");

  BasisIndexing nx{IndexKind::Natural, 8};
  CHECK_THROWS_AS(
      build_family(json{{"descriptor", "mult_group"}, {"t_list", {0.5}}}, nx),
      ValidationError);
  CHECK_THROWS_AS(build_family(json{{"descriptor", "frobnicate"}}, nx),
                  ValidationError);

  SUBCASE("custom members come from matrix CSVs, B_1 enforced") {
    TempDir tmp("fam");
    std::string ok = (tmp.path / "member_a.csv").string();
    write_matrix_csv(Mat(0.5 * Mat::Identity(8, 8)), ok);
    auto cfam = build_family(
        json{{"descriptor", "custom"}, {"matrix_files", {ok}}}, nx);
    REQUIRE(cfam.size() == 1);
    CHECK(cfam.members[0].first == "member_a");

    std::string big = (tmp.path / "too_big.csv").string();
    write_matrix_csv(Mat(2.0 * Mat::Identity(8, 8)), big);
    CHECK_THROWS_AS(
        build_family(json{{"descriptor", "custom"}, {"matrix_files", {big}}},
                     nx),
        NumericContractError);

    std::string small = (tmp.path / "wrong_dim.csv").string();
    write_matrix_csv(Mat(Mat::Identity(4, 4)), small);
    CHECK_THROWS_AS(
        build_family(
            json{{"descriptor", "custom"}, {"matrix_files", {small}}}, nx),
        ValidationError);
  }
}

TEST_CASE("run_experiment: structure, c0, and determinism") {
  auto doc = minimal_config();
  doc["analyses"] = json::array(
      {{{"type", "banded"}, {"K", 0}},
       {{"type", "modulus"}, {"budget", 200}, {"seed", 5}},
       {{"type", "certificate"},
        {"delta_max", 1e-2},
        {"gain_min", 10.0},
        {"budget", 500},
        {"seed", 5}}});
  auto cfg = ExperimentConfig::parse(doc);
  json rep = run_experiment(cfg);

  CHECK(rep["artifact_version"] == kVersion);
  CHECK(rep["config"] == doc);
  CHECK(rep["scheme"]["c0"] == 0.5);
  CHECK(rep["scheme"]["schedule"][0] == 1);
  CHECK(rep["tolerances"]["norm"] == kNormTol);
  REQUIRE(rep["results"].size() == 3);
  CHECK(rep["results"][0]["result"]["passed"] == false);
  CHECK(rep["results"][2]["result"]["found"] == true);
  CHECK(rep["results"][2]["result"]["certificate"]["gain"].get<double>() >=
        10.0);
  CHECK(rep.contains("wall_time_s"));

  // byte-identical modulo wall time
  json rep2 = run_experiment(cfg);
  CHECK(strip_wall_time(rep).dump() == strip_wall_time(rep2).dump());
}

TEST_CASE("run_experiment: dimension criterion over the config ladder") {
  auto doc = minimal_config();
  doc["space"] = {{"indexing", "natural"}, {"dims", {16, 32}}};
  doc["family"] = {{"descriptor", "adjoint_right_shift_powers"},
                   {"n_max", 5}};
  doc["analyses"] = json::array({{{"type", "dim_criterion"},
                                  {"v_basis_indices", {1}},
                                  {"c", 0.5}},
                                 {{"type", "dim_criterion_oracle"},
                                  {"v_basis_indices", {1}},
                                  {"c", 0.5},
                                  {"trials", 300},
                                  {"seed", 3}},
                                 {{"type", "isometry_preimage"},
                                  {"v_basis_indices", {1}}}});
  // the adjoint shifts are not bounded below, so the preimage check refuses
  auto cfg = ExperimentConfig::parse(doc);
  CHECK_THROWS_AS(run_experiment(cfg), ValidationError);

  doc["analyses"].erase(2);
  json rep = run_experiment(ExperimentConfig::parse(doc));
  CHECK(rep["results"][0]["result"]["container_dim"] == 5);
  CHECK(rep["results"][0]["result"]["verdict"] == "stabilizing");
  CHECK(rep["results"][1]["result"]["rank"] == 5);
}

TEST_CASE("emit_curves: naming, header, duplicate suffix") {
  TempDir tmp("curves");
  auto doc = minimal_config();
  doc["analyses"] = json::array(
      {{{"type", "modulus"}, {"budget", 200}, {"seed", 5}, {"label", "shift"}},
       {{"type", "modulus"}, {"budget", 200}, {"seed", 6}, {"label", "shift"}},
       {{"type", "modulus"}, {"budget", 200}, {"seed", 7}}});
  json rep = run_experiment(ExperimentConfig::parse(doc));
  auto files = emit_curves(rep, tmp.path.string());
  REQUIRE(files.size() == 3);
  CHECK(fs::path(files[0]).filename() == "shift.csv");
  CHECK(fs::path(files[1]).filename() == "shift-2.csv");
  CHECK(fs::path(files[2]).filename() == "modulus.csv");

  std::ifstream is(files[0]);
  std::string line;
  std::getline(is, line);
  CHECK(line == "delta,omega_hat,samples");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);  // the default delta grid

  CHECK_THROWS_AS(emit_curves(json{{"results", json::array()}}, tmp.path),
                  ValidationError);
}

TEST_CASE("describe_family wording") {
  auto doc = minimal_config();
  doc["space"] = {{"indexing", "natural"}, {"dims", {12}}};
  doc["family"] = {{"descriptor", "right_shift_powers"}, {"n_max", 3}};
  auto s = describe_family(ExperimentConfig::parse(doc));
  CHECK(s.find("3 members") != std::string::npos);
  CHECK(s.find("dim 12") != std::string::npos);
  CHECK(s.find("natural indexing") != std::string::npos);
  CHECK(s.find("max superdiagonal -1") != std::string::npos);
  CHECK(s.find("safe window: boundary distance > 3") != std::string::npos);

  TempDir tmp("describe");
  std::string idcsv = (tmp.path / "I.csv").string();
  write_matrix_csv(Mat(Mat::Identity(6, 6)), idcsv);
  doc["space"] = {{"indexing", "natural"}, {"dims", {6}}};
  doc["family"] = {{"descriptor", "custom"}, {"matrix_files", {idcsv}}};
  auto s2 = describe_family(ExperimentConfig::parse(doc));
  CHECK(s2.find("identity") != std::string::npos);
}

TEST_CASE("curve CSV values round-trip against the report") {
  TempDir tmp("roundtrip");
  auto doc = minimal_config();
  doc["analyses"] = json::array(
      {{{"type", "modulus"}, {"budget", 200}, {"seed", 5}, {"label", "c"}}});
  json rep = run_experiment(ExperimentConfig::parse(doc));
  auto files = emit_curves(rep, tmp.path.string());
  REQUIRE(files.size() == 1);

  const json& curve = rep["results"][0]["result"]["curve"];
  std::ifstream is(files[0]);
  std::string line;
  std::getline(is, line);  // header
  for (std::size_t i = 0; std::getline(is, line); ++i) {
    if (line.empty()) continue;
    double delta = std::strtod(line.c_str(), nullptr);
    auto comma = line.find(',');
    double omega = std::strtod(line.c_str() + comma + 1, nullptr);
    CHECK(delta == curve["deltas"][i].get<double>());
    CHECK(omega == curve["omega_hat"][i].get<double>());
  }
}
