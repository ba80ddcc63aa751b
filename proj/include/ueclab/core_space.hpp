#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ueclab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Default tolerances used across the library.
constexpr double kNormTol = 1e-9;       // unit-ball membership slack
constexpr double kAlgebraTol = 1e-12;   // exact algebraic identities
constexpr double kRankTol = 1e-9;       // SVD / rank thresholds
constexpr double kStatTol = 1e-2;       // statistical assertions (relative)

// Terms whose weight 2^{-i} falls below double precision contribute nothing
// to the metric sums; evaluation stops there.
constexpr int kMetricTermCap = 256;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// <a,b> = sum_k a_k conj(b_k)
inline Complex inner(const Vec& a, const Vec& b) { return b.dot(a); }

enum class IndexKind { Natural, Integer };

// Maps an abstract basis index set (N starting at 1, or Z) onto storage
// positions 0..N_t-1. The Z enumeration is 0,1,-1,2,-2,... so growing the
// truncation extends, never reshuffles, earlier positions.
struct BasisIndexing {
  IndexKind kind = IndexKind::Natural;
  int truncation_dim = 0;

  bool retained(long abstract_index) const;
  int storage_of(long abstract_index) const;  // throws if not retained
  long abstract_of(int pos) const;
  // Largest n such that F_n (span{e_1..e_n}, or span{e_-n..e_n} for Z)
  // fits inside the truncation.
  int max_level() const;
  // Storage positions spanning F_n.
  std::vector<int> level_positions(int n) const;
  Vec basis_vector(long abstract_index) const;
  std::string id() const;
};

struct MetricValue {
  double value = 0.0;
  double truncation_error = 0.0;
};

// The dense-sequence prefix h_1..h_M, the schedule a_n with h_{a_n} = e_n,
// and the certified covering radii of the embedded 1/n-nets.
struct MetricScheme {
  BasisIndexing indexing;
  std::vector<Vec> h_seq;           // h_1..h_M, each of norm <= 1
  std::vector<int> schedule;        // a_1 < a_2 < ... < a_L (1-based positions)
  std::vector<double> net_quality;  // certified radius per n = 1..net_depth
  double tail_bound = 0.0;          // 2^{1-M}

  int dim() const { return indexing.truncation_dim; }
  std::size_t prefix_size() const { return h_seq.size(); }
  std::string id() const;

  // Cached h-matrix (capped prefix as columns) and weights 2^{-i}.
  const Mat& h_matrix() const;
  const Eigen::VectorXd& weights() const;

private:
  mutable Mat h_cache_;
  mutable Eigen::VectorXd w_cache_;
};

MetricScheme build_scheme(const BasisIndexing& indexing, int L, int net_depth,
                          std::uint64_t seed);

MetricValue rho(const Vec& x, const Vec& y, const MetricScheme& scheme);
MetricValue d_metric(const Mat& A, const Mat& B, const MetricScheme& scheme);
// d(x1 (x) y1, x2 (x) y2) without materializing the matrices.
MetricValue d_metric_rank_one(const Vec& x1, const Vec& y1, const Vec& x2,
                              const Vec& y2, const MetricScheme& scheme);

Vec norm_ball_project(const Vec& x);

// Deterministic mix of uniform sphere directions and interior points
// (radius u^{1/space_dim}).
std::vector<Vec> sample_unit_ball(int space_dim, int count, std::uint64_t seed);

}  // namespace ueclab
