#include "ueclab/operators.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ueclab {

double operator_norm(const Mat& T) {
  return T.jacobiSvd().singularValues()(0);
}

double smallest_singular_value(const Mat& T) {
  auto sv = T.jacobiSvd().singularValues();
  return sv(sv.size() - 1);
}

void require_contraction(const Mat& T, const std::string& what) {
  double s = operator_norm(T);
  if (s > 1.0 + kNormTol)
    throw NumericContractError(what + ": operator norm " + std::to_string(s) +
                               " exceeds the B_1 tolerance");
}

void OperatorFamily::validate() const {
  for (const auto& [label, m] : members) {
    if (m.rows() != dim() || m.cols() != dim())
      throw ValidationError("family member " + label +
                            " has mismatched dimension");
    require_contraction(m, "family member " + label);
  }
}

OperatorFamily OperatorFamily::truncated(int n) const {
  if (n < 1 || n > dim())
    throw ValidationError("truncated: dimension out of range");
  OperatorFamily out;
  out.descriptor = descriptor;
  out.indexing = indexing;
  out.indexing.truncation_dim = n;
  for (const auto& [label, m] : members)
    out.members.emplace_back(label, m.topLeftCorner(n, n));
  return out;
}

Mat left_shift(const BasisIndexing& indexing) {
  const int N = indexing.truncation_dim;
  Mat S = Mat::Zero(N, N);
  for (int pos = 0; pos < N; ++pos) {
    long k = indexing.abstract_of(pos);
    if (indexing.retained(k - 1)) S(indexing.storage_of(k - 1), pos) = 1.0;
  }
  return S;
}

Mat right_shift(const BasisIndexing& indexing) {
  if (indexing.kind != IndexKind::Natural)
    throw ValidationError("right_shift: natural indexing required");
  const int N = indexing.truncation_dim;
  Mat S = Mat::Zero(N, N);
  for (int pos = 0; pos < N; ++pos) {
    long k = indexing.abstract_of(pos);
    if (indexing.retained(k + 1)) S(indexing.storage_of(k + 1), pos) = 1.0;
  }
  return S;
}

OperatorFamily power_family(const Mat& base, const BasisIndexing& indexing,
                            const std::vector<int>& exponents,
                            const std::string& label_base) {
  require_contraction(base, "power_family base");
  OperatorFamily fam;
  fam.indexing = indexing;
  fam.descriptor = label_base + "_powers";
  const int N = static_cast<int>(base.rows());
  for (int n : exponents) {
    if (n < 0) throw ValidationError("power_family: negative exponent");
    Mat p = Mat::Identity(N, N);
    for (int i = 0; i < n; ++i) p = base * p;
    fam.members.emplace_back(label_base + "^" + std::to_string(n),
                             std::move(p));
  }
  return fam;
}

Mat mult_group_element(double t, int n_modes) {
  BasisIndexing ix{IndexKind::Integer, n_modes};
  Mat U = Mat::Zero(n_modes, n_modes);
  for (int col = 0; col < n_modes; ++col) {
    long n = ix.abstract_of(col);
    for (int row = 0; row < n_modes; ++row) {
      long m = ix.abstract_of(row);
      double arg = t + static_cast<double>(n - m);
      if (arg == std::floor(arg)) {
        U(row, col) = (arg == 0.0) ? 1.0 : 0.0;  // sinc is exact at integers
      } else {
        U(row, col) = std::sin(M_PI * arg) / (M_PI * arg);
      }
    }
  }
  return U;
}

Mat rank_one(const Vec& x, const Vec& y) {
  if (x.norm() > 1.0 + kNormTol || y.norm() > 1.0 + kNormTol)
    throw NumericContractError("rank_one: factors must lie in H_1");
  return x * y.adjoint();  // (x (x) y) h = <h,y> x
}

Mat adjoint(const Mat& T) { return T.adjoint(); }

namespace {

Mat polar_factor(const Mat& U) {
  Eigen::JacobiSVD<Mat> svd(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

SuperMap make_supermap(SuperMapKind kind, const Mat& operand,
                       const std::string& label) {
  require_contraction(operand, "supermap operand " + label);
  SuperMap m;
  m.kind = kind;
  m.label = label;
  m.operand = operand;
  if (kind == SuperMapKind::Conjugation) {
    // The operand must be unitary up to truncation leakage: its nonzero
    // singular values sit at 1. Otherwise conjugation is not an
    // automorphism of the ball.
    if (operator_norm(operand) < 1.0 - 1e-3)
      throw ValidationError("supermap operand " + label +
                            " is not unitary (top singular value below 1)");
    const int N = static_cast<int>(operand.rows());
    double defect = (operand.adjoint() * operand - Mat::Identity(N, N)).norm();
    m.unitary_defect = defect;
    m.operand = (defect > 1e-6) ? polar_factor(operand) : operand;
  }
  m.operand_adj = m.operand.adjoint();
  return m;
}

Mat SuperMap::apply(const Mat& A) const {
  if (A.rows() != operand.rows() || A.cols() != operand.cols())
    throw ValidationError("supermap: operand/argument dimension mismatch");
  switch (kind) {
    case SuperMapKind::LeftMult:
      return operand * A;
    case SuperMapKind::RightMult:
      return A * operand;
    case SuperMapKind::Conjugation:
      return operand * A * operand_adj;
  }
  throw ValidationError("supermap: unknown kind");
}

std::pair<Vec, Vec> SuperMap::apply_rank_one(const Vec& x, const Vec& y) const {
  // x (x) y = x y^adj
  switch (kind) {
    case SuperMapKind::LeftMult:
      return {operand * x, y};
    case SuperMapKind::RightMult:
      return {x, operand.adjoint() * y};
    case SuperMapKind::Conjugation:
      return {operand * x, operand * y};
  }
  throw ValidationError("supermap: unknown kind");
}

Mat apply_supermap(const SuperMap& m, const Mat& A) { return m.apply(A); }

std::vector<SuperMap> supermap_family(const OperatorFamily& family,
                                      SuperMapKind kind) {
  std::vector<SuperMap> out;
  out.reserve(family.size());
  for (const auto& [label, m] : family.members)
    out.push_back(make_supermap(kind, m, label));
  return out;
}

OperatorFamily left_shift_powers(const BasisIndexing& indexing, int k_max) {
  std::vector<int> exps;
  for (int k = 1; k <= k_max; ++k) exps.push_back(k);
  auto fam = power_family(left_shift(indexing), indexing, exps, "S");
  fam.descriptor = "left_shift_powers";
  return fam;
}

OperatorFamily right_shift_powers(const BasisIndexing& indexing, int n_max) {
  std::vector<int> exps;
  for (int n = 1; n <= n_max; ++n) exps.push_back(n);
  auto fam = power_family(right_shift(indexing), indexing, exps, "S_r");
  fam.descriptor = "right_shift_powers";
  return fam;
}

OperatorFamily adjoint_right_shift_powers(const BasisIndexing& indexing,
                                          int n_max) {
  std::vector<int> exps;
  for (int n = 1; n <= n_max; ++n) exps.push_back(n);
  auto fam =
      power_family(adjoint(right_shift(indexing)), indexing, exps, "S_r*");
  fam.descriptor = "adjoint_right_shift_powers";
  return fam;
}

OperatorFamily mult_group_family(const std::vector<double>& t_list,
                                 int n_modes) {
  OperatorFamily fam;
  fam.indexing = BasisIndexing{IndexKind::Integer, n_modes};
  fam.descriptor = "mult_group";
  for (double t : t_list) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "u_%g", t);
    fam.members.emplace_back(buf, mult_group_element(t, n_modes));
  }
  return fam;
}

}  // namespace ueclab
