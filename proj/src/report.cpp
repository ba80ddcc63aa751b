#include "ueclab/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace ueclab {

double sig12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i)
    out.push_back({sig12(v[i].real()), sig12(v[i].imag())});
  return out;
}

json growth_to_json(const std::vector<std::pair<int, int>>& gt) {
  json out = json::array();
  for (const auto& [n, d] : gt) out.push_back({{"truncation_dim", n},
                                               {"container_dim", d}});
  return out;
}

}  // namespace

json to_json(const MetricValue& v) {
  return {{"value", sig12(v.value)},
          {"truncation_error", sig12(v.truncation_error)}};
}

json to_json(const ModulusCurve& c) {
  json deltas = json::array(), omega = json::array();
  for (double d : c.deltas) deltas.push_back(sig12(d));
  for (double o : c.omega_hat) omega.push_back(sig12(o));
  return {{"label", c.label},
          {"deltas", deltas},
          {"omega_hat", omega},
          {"method", c.method},
          {"samples_per_delta", c.samples_per_delta},
          {"seed", c.seed}};
}

json to_json(const NonUecCertificate& c) {
  return {{"member_label", c.member_label},
          {"x", vec_to_json(c.x)},
          {"y", vec_to_json(c.y)},
          {"input_dist", sig12(c.input_dist)},
          {"output_dist", sig12(c.output_dist)},
          {"gain", sig12(c.gain)},
          {"scheme_id", c.scheme_id}};
}

json to_json(const OperatorCertificate& c) {
  return {{"member_label", c.member_label},
          {"pair_shape", "rank_one"},
          {"x", vec_to_json(c.x)},
          {"y", vec_to_json(c.y)},
          {"input_dist", sig12(c.input_dist)},
          {"output_dist", sig12(c.output_dist)},
          {"gain", sig12(c.gain)},
          {"scheme_id", c.scheme_id}};
}

json to_json(const DimCriterionReport& r) {
  json per_member = json::array();
  for (const auto& mc : r.per_member) {
    json sv = json::array();
    for (double s : mc.singular_values) sv.push_back(sig12(s));
    per_member.push_back({{"label", mc.label},
                          {"singular_values", sv},
                          {"count_at_least_c", mc.count_at_least_c}});
  }
  return {{"c", sig12(r.c)},
          {"per_member", per_member},
          {"container_dim", r.container_dim},
          {"growth_trace", growth_to_json(r.growth_trace)},
          {"verdict", r.verdict}};
}

json to_json(const BandedResult& r) {
  json out = {{"passed", r.passed}};
  if (r.violation) {
    out["first_violation"] = {{"label", r.violation->label},
                              {"i", r.violation->i},
                              {"j", r.violation->j},
                              {"value", {sig12(r.violation->value.real()),
                                         sig12(r.violation->value.imag())}}};
  }
  return out;
}

json to_json(const PreimageGrowthReport& r) {
  return {{"beta", sig12(r.beta)},
          {"growth_trace", growth_to_json(r.growth_trace)},
          {"verdict", r.verdict}};
}

json to_json(const EcUecReport& r) {
  json ptwise = json::array();
  for (const auto& pc : r.pointwise) ptwise.push_back(to_json(pc));
  json pmax = json::array();
  for (double v : r.pointwise_max) pmax.push_back(sig12(v));
  return {{"uniform", to_json(r.uniform)},
          {"pointwise", ptwise},
          {"pointwise_max", pmax},
          {"uniform_bounded_by_pointwise", r.uniform_bounded_by_pointwise}};
}

json to_json(const CompositionReport& r) {
  json bound = json::array();
  for (double b : r.bound) bound.push_back(sig12(b));
  return {{"f_curve", to_json(r.f_curve)},
          {"g_curve", to_json(r.g_curve)},
          {"fg_curve", to_json(r.fg_curve)},
          {"bound", bound},
          {"inequality_holds", r.inequality_holds}};
}

json to_json(const CorrespondenceVerdict& r) {
  json out = {{"verdict", r.verdict}, {"agree", r.agree}};
  out["vector_certificate"] =
      r.vector_certificate ? to_json(*r.vector_certificate) : json(nullptr);
  out["operator_certificate"] =
      r.operator_certificate ? to_json(*r.operator_certificate)
                             : json(nullptr);
  if (r.lifted) {
    out["lifted_certificate"] = to_json(r.lifted->lifted);
    out["lifted_valid"] = r.lifted->valid;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix CSV
// ---------------------------------------------------------------------------

void write_matrix_csv(const Mat& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      char buf[80];
      std::snprintf(buf, sizeof(buf), "\"%.12g,%.12g\"", m(i, j).real(),
                    m(i, j).imag());
      os << buf << (j + 1 < m.cols() ? "," : "");
    }
    os << "\n";
  }
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path);
  std::vector<std::vector<Complex>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<Complex> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      std::size_t open = line.find('"', pos);
      if (open == std::string::npos) break;
      std::size_t close = line.find('"', open + 1);
      if (close == std::string::npos)
        throw ValidationError("malformed matrix CSV cell in " + path);
      std::string cell = line.substr(open + 1, close - open - 1);
      std::size_t comma = cell.find(',');
      if (comma == std::string::npos)
        throw ValidationError("malformed matrix CSV cell in " + path);
      row.emplace_back(std::strtod(cell.substr(0, comma).c_str(), nullptr),
                       std::strtod(cell.substr(comma + 1).c_str(), nullptr));
      pos = close + 1;
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("empty matrix CSV " + path);
  Mat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ValidationError("ragged matrix CSV " + path);
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

const json& need(const json& obj, const char* key, const char* ctx) {
  if (!obj.contains(key))
    throw ValidationError(std::string("config: missing '") + key + "' in " +
                          ctx);
  return obj.at(key);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("unreadable config " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return parse(doc);
}

ExperimentConfig ExperimentConfig::parse(const json& doc) {
  ExperimentConfig cfg;
  cfg.doc = doc;

  const json& space = need(doc, "space", "config");
  std::string kind = need(space, "indexing", "space").get<std::string>();
  if (kind == "natural") {
    cfg.indexing = IndexKind::Natural;
  } else if (kind == "integer") {
    cfg.indexing = IndexKind::Integer;
  } else {
    throw ValidationError("config: indexing must be natural|integer");
  }
  for (const auto& d : need(space, "dims", "space"))
    cfg.dims.push_back(d.get<int>());
  if (cfg.dims.empty()) throw ValidationError("config: empty dims ladder");
  for (std::size_t i = 1; i < cfg.dims.size(); ++i)
    if (cfg.dims[i] <= cfg.dims[i - 1])
      throw ValidationError("ladder not increasing");
  if (cfg.dims.back() > kDimCap)
    throw ValidationError("config: dimension exceeds cap " +
                          std::to_string(kDimCap));

  const json& scheme = need(doc, "scheme", "config");
  cfg.scheme_L = need(scheme, "L", "scheme").get<int>();
  cfg.scheme_net_depth = need(scheme, "net_depth", "scheme").get<int>();
  cfg.scheme_seed = need(scheme, "seed", "scheme").get<std::uint64_t>();

  cfg.family = need(doc, "family", "config");
  cfg.analyses = need(doc, "analyses", "config");
  if (!cfg.analyses.is_array())
    throw ValidationError("config: analyses must be an array");
  for (const auto& a : cfg.analyses) {
    std::string type = need(a, "type", "analysis").get<std::string>();
    // Seeds are explicit: no entropy defaults.
    if (type == "certificate" || type == "modulus" || type == "ec_uec" ||
        type == "composition" || type == "correspondence" ||
        type == "dim_criterion_oracle")
      need(a, "seed", type.c_str());
  }
  if (doc.contains("output") && doc["output"].contains("dir"))
    cfg.out_dir = doc["output"]["dir"].get<std::string>();
  return cfg;
}

OperatorFamily build_family(const json& descriptor, const BasisIndexing& ix) {
  std::string kind =
      need(descriptor, "descriptor", "family").get<std::string>();
  OperatorFamily fam;
  if (kind == "left_shift_powers") {
    fam = left_shift_powers(ix, need(descriptor, "k_max", kind.c_str()));
  } else if (kind == "right_shift_powers") {
    fam = right_shift_powers(ix, need(descriptor, "n_max", kind.c_str()));
  } else if (kind == "adjoint_right_shift_powers") {
    fam = adjoint_right_shift_powers(ix,
                                     need(descriptor, "n_max", kind.c_str()));
  } else if (kind == "mult_group") {
    if (ix.kind != IndexKind::Integer)
      throw ValidationError("mult_group requires integer indexing");
    std::vector<double> ts;
    for (const auto& t : need(descriptor, "t_list", kind.c_str()))
      ts.push_back(t.get<double>());
    fam = mult_group_family(ts, ix.truncation_dim);
  } else if (kind == "custom") {
    fam.indexing = ix;
    fam.descriptor = "custom";
    for (const auto& f : need(descriptor, "matrix_files", kind.c_str())) {
      std::string path = f.get<std::string>();
      Mat m = read_matrix_csv(path);
      if (m.rows() != ix.truncation_dim || m.cols() != ix.truncation_dim)
        throw ValidationError("custom member " + path +
                              " does not match the configured dimension");
      fam.members.emplace_back(
          std::filesystem::path(path).stem().string(), std::move(m));
    }
  } else {
    throw ValidationError("invalid family descriptor: " + kind);
  }
  fam.validate();  // B_1 contract at the boundary (NumericContractError)
  return fam;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> basis_from_indices(const json& a, const BasisIndexing& ix) {
  std::vector<Vec> out;
  for (const auto& k : need(a, "v_basis_indices", "analysis"))
    out.push_back(ix.basis_vector(k.get<long>()));
  return out;
}

std::vector<double> deltas_from(const json& a) {
  if (!a.contains("deltas")) return default_delta_grid();
  std::vector<double> out;
  for (const auto& d : a["deltas"]) out.push_back(d.get<double>());
  return out;
}

std::vector<int> truncations_from(const json& a,
                                  const std::vector<int>& fallback) {
  if (!a.contains("truncations")) return fallback;
  std::vector<int> out;
  for (const auto& d : a["truncations"]) out.push_back(d.get<int>());
  return out;
}

}  // namespace

json run_experiment(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();

  BasisIndexing ix{cfg.indexing, cfg.dims.back()};
  MetricScheme scheme =
      build_scheme(ix, cfg.scheme_L, cfg.scheme_net_depth, cfg.scheme_seed);
  OperatorFamily family = build_family(cfg.family, ix);

  json results = json::array();
  for (const auto& a : cfg.analyses) {
    std::string type = a.at("type").get<std::string>();
    json entry = {{"type", type}};
    if (a.contains("label")) entry["label"] = a["label"];

    if (type == "banded") {
      entry["result"] = to_json(banded_check(family, need(a, "K", "banded")));
    } else if (type == "dim_criterion") {
      auto rep = dim_criterion(family, basis_from_indices(a, ix),
                               need(a, "c", type.c_str()).get<double>(),
                               truncations_from(a, cfg.dims));
      entry["result"] = to_json(rep);
    } else if (type == "dim_criterion_oracle") {
      auto res = dim_criterion_oracle(
          family, basis_from_indices(a, ix),
          need(a, "c", type.c_str()).get<double>(),
          need(a, "trials", type.c_str()).get<int>(),
          a.at("seed").get<std::uint64_t>());
      entry["result"] = {{"per_member_counts", res.per_member_counts},
                         {"rank", res.rank}};
    } else if (type == "isometry_preimage") {
      entry["result"] = to_json(isometry_preimage_check(
          family, basis_from_indices(a, ix), truncations_from(a, cfg.dims)));
    } else if (type == "modulus") {
      auto curve = estimate_modulus_vectors(
          family, scheme, deltas_from(a),
          need(a, "budget", type.c_str()).get<int>(),
          a.at("seed").get<std::uint64_t>());
      curve.label = a.contains("label") ? a["label"].get<std::string>()
                                        : "modulus";
      entry["result"] = {{"curve", to_json(curve)}};
    } else if (type == "certificate") {
      auto cert = certificate_search(
          family, scheme, need(a, "delta_max", type.c_str()).get<double>(),
          need(a, "gain_min", type.c_str()).get<double>(),
          a.at("seed").get<std::uint64_t>(),
          need(a, "budget", type.c_str()).get<int>());
      entry["result"] = {{"found", cert.has_value()}};
      if (cert) entry["result"]["certificate"] = to_json(*cert);
    } else if (type == "ec_uec") {
      entry["result"] = to_json(ec_equals_uec_check(
          family, scheme, need(a, "base_points", type.c_str()).get<int>(),
          need(a, "budget", type.c_str()).get<int>(),
          a.at("seed").get<std::uint64_t>()));
    } else if (type == "composition") {
      OperatorFamily g = build_family(need(a, "g_family", type.c_str()), ix);
      entry["result"] = to_json(composition_modulus_check(
          family, g, scheme, deltas_from(a),
          need(a, "budget", type.c_str()).get<int>(),
          a.at("seed").get<std::uint64_t>()));
    } else if (type == "correspondence") {
      entry["result"] = to_json(automorphism_correspondence(
          family, scheme, need(a, "delta_max", type.c_str()).get<double>(),
          need(a, "gain_min", type.c_str()).get<double>(),
          need(a, "budget", type.c_str()).get<int>(),
          a.at("seed").get<std::uint64_t>()));
    } else {
      throw ValidationError("invalid analysis type: " + type);
    }
    results.push_back(std::move(entry));
  }

  json scheme_json = {{"id", scheme.id()},
                      {"prefix_size", scheme.prefix_size()},
                      {"schedule", scheme.schedule},
                      {"net_quality", scheme.net_quality},
                      {"tail_bound", sig12(scheme.tail_bound)},
                      {"c0", sig12(std::ldexp(1.0, -scheme.schedule.front()))}};

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {{"artifact_version", kVersion},
          {"config", cfg.doc},
          {"scheme", scheme_json},
          {"tolerances",
           {{"norm", kNormTol},
            {"algebra", kAlgebraTol},
            {"rank", kRankTol},
            {"statistical", kStatTol}}},
          {"results", results},
          {"wall_time_s", wall}};
}

// ---------------------------------------------------------------------------
// Curve CSV emission
// ---------------------------------------------------------------------------

namespace {

void collect_curves(const json& node, const std::string& label,
                    std::vector<std::pair<std::string, json>>& out) {
  if (!node.is_object()) return;
  if (node.contains("deltas") && node.contains("omega_hat")) {
    std::string l = node.value("label", "");
    out.emplace_back(l.empty() ? label : l, node);
    return;
  }
  for (const auto& [key, value] : node.items()) {
    if (value.is_object()) {
      collect_curves(value, label + "-" + key, out);
    } else if (value.is_array()) {
      int i = 0;
      for (const auto& item : value) {
        std::string sub = label + "-" + key;
        if (key != "results")
          sub += "-" + std::to_string(++i);
        else if (item.is_object() && item.contains("type"))
          sub = item["type"].get<std::string>();
        collect_curves(item, sub, out);
      }
    }
  }
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? "curve" : out;
}

}  // namespace

std::vector<std::string> emit_curves(const json& report,
                                     const std::string& out_dir) {
  std::vector<std::pair<std::string, json>> curves;
  collect_curves(report, "curve", curves);
  if (curves.empty())
    throw ValidationError("emit_curves: report contains no modulus curves");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  std::vector<std::string> written;
  std::map<std::string, int> seen;
  for (const auto& [label, curve] : curves) {
    std::string base = sanitize(label);
    int n = ++seen[base];
    std::string name = (n == 1) ? base : base + "-" + std::to_string(n);
    std::string path = out_dir + "/" + name + ".csv";
    std::ofstream os(path);
    if (!os) throw ValidationError("emit_curves: cannot write " + path);
    os << "delta,omega_hat,samples\n";
    int samples = curve.value("samples_per_delta", 0);
    const auto& deltas = curve["deltas"];
    const auto& omega = curve["omega_hat"];
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d\n",
                    deltas[i].get<double>(), omega[i].get<double>(), samples);
      os << buf;
    }
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Describe
// ---------------------------------------------------------------------------

std::string describe_family(const ExperimentConfig& cfg) {
  BasisIndexing ix{cfg.indexing, cfg.dims.back()};
  OperatorFamily fam = build_family(cfg.family, ix);

  int max_super = std::numeric_limits<int>::min();
  int max_sub = std::numeric_limits<int>::min();
  double max_norm = 0.0;
  for (const auto& [label, m] : fam.members) {
    max_norm = std::max(max_norm, operator_norm(m));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (std::abs(m(i, j)) > 1e-12) {
          max_super = std::max(max_super, j - i);
          max_sub = std::max(max_sub, i - j);
        }
  }

  std::ostringstream os;
  os << fam.size() << " members, dim " << fam.dim() << " ("
     << (ix.kind == IndexKind::Natural ? "natural" : "integer")
     << " indexing), sigma_max " << sig12(max_norm);
  bool identity_only =
      fam.size() >= 1 && max_super == 0 && max_sub == 0 &&
      std::all_of(fam.members.begin(), fam.members.end(), [&](const auto& p) {
        return (p.second - Mat::Identity(fam.dim(), fam.dim())).norm() < 1e-12;
      });
  if (identity_only) {
    os << ", identity";
  } else if (max_super > std::numeric_limits<int>::min()) {
    os << ", max superdiagonal " << max_super;
  } else {
    os << ", zero family";
  }
  // Safe window: indices far enough from the truncation boundary that the
  // banded structure acts exactly.
  if (max_sub > 0 || max_super > 0) {
    int reach = std::max({max_sub, max_super, 0});
    os << ", safe window: boundary distance > " << reach;
  }
  return os.str();
}

}  // namespace ueclab
