#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ueclab/core_space.hpp"

namespace ueclab {

double operator_norm(const Mat& T);
double smallest_singular_value(const Mat& T);

// Throws NumericContractError if sigma_max(T) > 1 + kNormTol.
void require_contraction(const Mat& T, const std::string& what);

struct OperatorFamily {
  std::vector<std::pair<std::string, Mat>> members;
  std::string descriptor = "custom";
  BasisIndexing indexing;

  int dim() const { return indexing.truncation_dim; }
  std::size_t size() const { return members.size(); }
  void validate() const;  // shared dims, all members in B_1
  // Leading-block restriction (storage prefix is stable under truncation).
  OperatorFamily truncated(int n) const;
};

enum class SuperMapKind { LeftMult, RightMult, Conjugation };

// psi_T : A -> TA, phi_T : A -> AT, alpha_u : A -> u A u*.
struct SuperMap {
  SuperMapKind kind;
  std::string label;
  Mat operand;
  Mat operand_adj;
  double unitary_defect = 0.0;  // recorded when the conjugation operand
                                // was replaced by its polar factor

  Mat apply(const Mat& A) const;
  // Fast path: image of x (x) y under this map, as a rank-one pair.
  std::pair<Vec, Vec> apply_rank_one(const Vec& x, const Vec& y) const;
};

Mat left_shift(const BasisIndexing& indexing);
Mat right_shift(const BasisIndexing& indexing);

OperatorFamily power_family(const Mat& base, const BasisIndexing& indexing,
                            const std::vector<int>& exponents,
                            const std::string& label_base);

// Truncated multiplication by e^{itx} on L^2[-pi,pi] in the Fourier-mode
// basis (Z-indexed); entries are sinc(t + n - m).
Mat mult_group_element(double t, int n_modes);

Mat rank_one(const Vec& x, const Vec& y);
Mat adjoint(const Mat& T);

SuperMap make_supermap(SuperMapKind kind, const Mat& operand,
                       const std::string& label);
Mat apply_supermap(const SuperMap& m, const Mat& A);
std::vector<SuperMap> supermap_family(const OperatorFamily& family,
                                      SuperMapKind kind);

// Descriptor-driven construction: left_shift_powers, right_shift_powers,
// adjoint_right_shift_powers, mult_group, conjugation targets.
OperatorFamily left_shift_powers(const BasisIndexing& indexing, int k_max);
OperatorFamily right_shift_powers(const BasisIndexing& indexing, int n_max);
OperatorFamily adjoint_right_shift_powers(const BasisIndexing& indexing,
                                          int n_max);
OperatorFamily mult_group_family(const std::vector<double>& t_list,
                                 int n_modes);

}  // namespace ueclab
