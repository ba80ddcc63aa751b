#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "ueclab/analysis.hpp"

namespace ueclab {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kDimCap = 512;

// Rounds to 12 significant digits; all report numbers pass through this so
// JSON and CSV round-trip at the documented precision.
double sig12(double v);

json to_json(const MetricValue& v);
json to_json(const ModulusCurve& c);
json to_json(const NonUecCertificate& c);
json to_json(const OperatorCertificate& c);
json to_json(const DimCriterionReport& r);
json to_json(const BandedResult& r);
json to_json(const PreimageGrowthReport& r);
json to_json(const EcUecReport& r);
json to_json(const CompositionReport& r);
json to_json(const CorrespondenceVerdict& r);

// Matrix CSV: row-major, one row per line, cells quoted "re,im".
void write_matrix_csv(const Mat& m, const std::string& path);
Mat read_matrix_csv(const std::string& path);

struct ExperimentConfig {
  json doc;  // validated echo
  IndexKind indexing = IndexKind::Natural;
  std::vector<int> dims;  // strictly increasing truncation ladder
  int scheme_L = 0;
  int scheme_net_depth = 0;
  std::uint64_t scheme_seed = 0;
  json family;    // descriptor object
  json analyses;  // array of analysis objects
  std::string out_dir;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse(const json& doc);
};

OperatorFamily build_family(const json& descriptor, const BasisIndexing& ix);

// Runs the configured analyses in order; the report embeds the config and
// the tolerance block. Throws ValidationError / NumericContractError.
json run_experiment(const ExperimentConfig& config);

// One CSV per modulus curve found in the report ("delta,omega_hat,samples");
// duplicate labels get a "-2", "-3", ... suffix.
std::vector<std::string> emit_curves(const json& report,
                                     const std::string& out_dir);

std::string describe_family(const ExperimentConfig& config);

}  // namespace ueclab
