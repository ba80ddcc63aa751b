#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ueclab/core_space.hpp"
#include "ueclab/operators.hpp"

namespace ueclab {

// ---------------------------------------------------------------------------
// Dimension criterion
// ---------------------------------------------------------------------------

struct MemberCompression {
  std::string label;
  std::vector<double> singular_values;  // of P_V T restricted to V^perp
  int count_at_least_c = 0;
};

struct DimCriterionReport {
  std::vector<Vec> v_basis;
  double c = 0.0;
  std::vector<MemberCompression> per_member;  // at the largest truncation
  int container_dim = 0;
  std::vector<std::pair<int, int>> growth_trace;  // (truncation, container)
  std::string verdict;                            // "stabilizing" | "growing"
};

DimCriterionReport dim_criterion(const OperatorFamily& family,
                                 const std::vector<Vec>& v_basis, double c,
                                 const std::vector<int>& truncation_dims);

// Independent randomized route: basis scan plus power iteration with
// deflation, no SVD library calls.
struct DimOracleResult {
  std::vector<int> per_member_counts;
  int rank = 0;  // numerical rank (1e-6) of all directions found
};

DimOracleResult dim_criterion_oracle(const OperatorFamily& family,
                                     const std::vector<Vec>& v_basis, double c,
                                     int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Banded sufficient condition / isometry necessary condition
// ---------------------------------------------------------------------------

struct BandedViolation {
  std::string label;
  int i = 0, j = 0;  // 1-based matrix indices
  Complex value;
};

struct BandedResult {
  bool passed = false;
  std::optional<BandedViolation> violation;
};

// True iff every member has t_{i,j} = 0 (|.| <= 1e-12) whenever j - i >= K.
BandedResult banded_check(const OperatorFamily& family, int K);

struct PreimageGrowthReport {
  double beta = 0.0;  // uniform lower bound on singular values
  std::vector<std::pair<int, int>> growth_trace;
  std::string verdict;
};

PreimageGrowthReport isometry_preimage_check(
    const OperatorFamily& family, const std::vector<Vec>& v_basis,
    const std::vector<int>& truncation_dims);

// ---------------------------------------------------------------------------
// Modulus-of-continuity estimation and certificate search
// ---------------------------------------------------------------------------

struct ModulusCurve {
  std::vector<double> deltas;
  std::vector<double> omega_hat;  // lower-bound estimates, isotonic
  std::string method = "sampling+local_search";
  int samples_per_delta = 0;
  std::uint64_t seed = 0;
  std::string label;
  // Argmax pair per delta (vector pairs; rank-one factors for super-maps).
  std::vector<std::pair<Vec, Vec>> witness_pairs;
};

std::vector<double> default_delta_grid();

ModulusCurve estimate_modulus_vectors(const OperatorFamily& family,
                                      const MetricScheme& scheme,
                                      const std::vector<double>& deltas,
                                      int budget, std::uint64_t seed);

// Candidate operator pairs are rank-one (the witness shape) plus random
// contraction pairs; for super-map families of conjugations/multiplications
// the rank-one path is exact and cheap.
ModulusCurve estimate_modulus_supermaps(const std::vector<SuperMap>& maps,
                                        const MetricScheme& scheme,
                                        const std::vector<double>& deltas,
                                        int budget, std::uint64_t seed);

struct NonUecCertificate {
  std::string member_label;
  Vec x, y;
  double input_dist = 0.0;
  double output_dist = 0.0;
  double gain = 0.0;
  std::string scheme_id;
};

std::optional<NonUecCertificate> certificate_search(
    const OperatorFamily& family, const MetricScheme& scheme, double delta_max,
    double gain_min, std::uint64_t seed, int budget = 10000);

// Operator-side search over rank-one pairs under a super-map family.
struct OperatorCertificate {
  std::string member_label;
  Vec x, y;  // certificate pair is x(x)x vs y(x)y
  double input_dist = 0.0;
  double output_dist = 0.0;
  double gain = 0.0;
  std::string scheme_id;
};

std::optional<OperatorCertificate> certificate_search_supermaps(
    const std::vector<SuperMap>& maps, const MetricScheme& scheme,
    double delta_max, double gain_min, std::uint64_t seed, int budget = 10000);

// ---------------------------------------------------------------------------
// Family-level correspondence checks
// ---------------------------------------------------------------------------

struct EcUecReport {
  ModulusCurve uniform;
  std::vector<ModulusCurve> pointwise;    // one per base point
  std::vector<double> pointwise_max;      // per delta
  bool uniform_bounded_by_pointwise = false;  // within slack 0.05
};

EcUecReport ec_equals_uec_check(const OperatorFamily& family,
                                const MetricScheme& scheme, int base_points,
                                int budget, std::uint64_t seed);

struct CompositionReport {
  ModulusCurve f_curve, g_curve, fg_curve;
  std::vector<double> bound;  // omega_F(omega_G(delta)+slack)+slack
  bool inequality_holds = false;
};

CompositionReport composition_modulus_check(const OperatorFamily& f,
                                            const OperatorFamily& g,
                                            const MetricScheme& scheme,
                                            const std::vector<double>& deltas,
                                            int budget, std::uint64_t seed,
                                            int pair_cap = 400);

struct LiftedCertificate {
  OperatorCertificate lifted;
  bool valid = false;  // d-gap >= 1e-4 and metrics reproduce
};

struct CorrespondenceVerdict {
  std::optional<NonUecCertificate> vector_certificate;
  std::optional<OperatorCertificate> operator_certificate;
  std::optional<LiftedCertificate> lifted;
  bool agree = false;       // both found or both absent
  std::string verdict;      // "both witnessed" | "both none" | "disagree"
};

CorrespondenceVerdict automorphism_correspondence(
    const OperatorFamily& u_family, const MetricScheme& scheme,
    double delta_max, double gain_min, int budget, std::uint64_t seed);

}  // namespace ueclab
