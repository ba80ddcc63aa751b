#include "ueclab/analysis.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace ueclab {

namespace {

constexpr double kCountSlack = 1e-9;  // sigma >= c - kCountSlack counts
constexpr double kOracleRankTol = 1e-6;

void require_orthonormal(const std::vector<Vec>& basis, const char* what) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex g = inner(basis[i], basis[j]);
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > 1e-9)
        throw ValidationError(std::string(what) + ": basis not orthonormal");
    }
  }
}

Mat stack_columns(const std::vector<Vec>& vs) {
  if (vs.empty()) return Mat();
  Mat m(vs[0].size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(i) = vs[i];
  return m;
}

// Restricts basis vectors to the leading block, checking support.
Mat restrict_basis(const std::vector<Vec>& basis, int n, const char* what) {
  Mat full = stack_columns(basis);
  for (int c = 0; c < full.cols(); ++c)
    for (int r = n; r < full.rows(); ++r)
      if (std::abs(full(r, c)) > 1e-12)
        throw ValidationError(std::string(what) +
                              ": V not inside truncation of dim " +
                              std::to_string(n));
  return full.topRows(n);
}

// Orthonormal basis of the complement of the (orthonormal) columns of V.
Mat perp_basis(const Mat& V) {
  const int n = static_cast<int>(V.rows());
  const int v = static_cast<int>(V.cols());
  Eigen::HouseholderQR<Mat> qr(V);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  return Q.rightCols(n - v);
}

int numerical_rank(const Mat& m, double tol) {
  if (m.cols() == 0) return 0;
  auto sv = m.jacobiSvd().singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dimension criterion
// ---------------------------------------------------------------------------

DimCriterionReport dim_criterion(const OperatorFamily& family,
                                 const std::vector<Vec>& v_basis, double c,
                                 const std::vector<int>& truncation_dims) {
  if (c <= 0.0 || c > 1.0)
    throw ValidationError("dim_criterion: c must lie in (0,1]");
  if (truncation_dims.empty())
    throw ValidationError("dim_criterion: empty truncation ladder");
  for (std::size_t i = 1; i < truncation_dims.size(); ++i)
    if (truncation_dims[i] <= truncation_dims[i - 1])
      throw ValidationError("dim_criterion: ladder not increasing");
  require_orthonormal(v_basis, "dim_criterion");
  family.validate();

  DimCriterionReport rep;
  rep.v_basis = v_basis;
  rep.c = c;

  for (int n : truncation_dims) {
    if (n > family.dim())
      throw ValidationError("dim_criterion: truncation exceeds family dim");
    Mat V = restrict_basis(v_basis, n, "dim_criterion");
    Mat W = perp_basis(V);
    std::vector<Vec> qualifying;
    std::vector<MemberCompression> per_member;
    for (const auto& [label, m] : family.members) {
      Mat T = m.topLeftCorner(n, n);
      Mat M_T = V.adjoint() * T * W;  // compression of T from V^perp to V
      Eigen::JacobiSVD<Mat> svd(M_T, Eigen::ComputeThinV);
      MemberCompression mc;
      mc.label = label;
      auto sv = svd.singularValues();
      for (int i = 0; i < sv.size(); ++i) {
        mc.singular_values.push_back(sv(i));
        if (sv(i) >= c - kCountSlack) {
          ++mc.count_at_least_c;
          qualifying.push_back(W * svd.matrixV().col(i));
        }
      }
      per_member.push_back(std::move(mc));
    }
    int container = numerical_rank(stack_columns(qualifying), kOracleRankTol);
    rep.growth_trace.emplace_back(n, container);
    if (n == truncation_dims.back()) {
      rep.per_member = std::move(per_member);
      rep.container_dim = container;
    }
  }
  const auto& gt = rep.growth_trace;
  rep.verdict = (gt.size() < 2 ||
                 gt[gt.size() - 1].second == gt[gt.size() - 2].second)
                    ? "stabilizing"
                    : "growing";
  return rep;
}

DimOracleResult dim_criterion_oracle(const OperatorFamily& family,
                                     const std::vector<Vec>& v_basis, double c,
                                     int trials, std::uint64_t seed) {
  if (trials <= 0) throw ValidationError("dim_criterion_oracle: trials = 0");
  if (c <= 0.0 || c > 1.0)
    throw ValidationError("dim_criterion_oracle: c must lie in (0,1]");
  require_orthonormal(v_basis, "dim_criterion_oracle");
  family.validate();

  const int n = family.dim();
  Mat V = restrict_basis(v_basis, n, "dim_criterion_oracle");
  Mat Pv = V * V.adjoint();
  auto project_perp = [&](const Vec& x) { return Vec(x - Pv * x); };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_perp = [&]() {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = Complex(g(rng), g(rng));
    x = project_perp(x);
    double nn = x.norm();
    return (nn > 1e-12) ? Vec(x / nn) : Vec(Vec::Zero(n));
  };

  // Quality of a direction under one member, via plain mat-vecs.
  auto quality = [&](const Mat& T, const Vec& x) {
    return (V.adjoint() * (T * x)).norm();
  };

  // Ascent on ||P_V T x||^2 / ||x||^2 over V^perp: power iteration on
  // W-projected T* P_V T, orthogonalized against already found directions.
  auto ascend = [&](const Mat& T, Vec x, const std::vector<Vec>& found) {
    for (int it = 0; it < 400; ++it) {
      Vec y = project_perp(T.adjoint() * (Pv * (T * x)));
      for (const auto& f : found) y -= inner(y, f) * f;
      double nn = y.norm();
      if (nn < 1e-14) break;
      x = y / nn;
    }
    return x;
  };

  DimOracleResult res;
  std::vector<Vec> collected;
  auto collect = [&](const Vec& x) {
    // Modified Gram-Schmidt rank accumulation at the oracle tolerance.
    Vec r = x;
    for (const auto& q : collected) r -= inner(r, q) * q;
    if (r.norm() > kOracleRankTol) collected.push_back(r.normalized());
  };

  for (const auto& [label, m] : family.members) {
    std::vector<Vec> found;
    const int cap = static_cast<int>(v_basis.size());
    for (int k = 0; k < cap; ++k) {
      double best_q = -1.0;
      Vec best;
      for (int attempt = 0; attempt < 3; ++attempt) {
        Vec x = ascend(m, random_perp(), found);
        for (const auto& f : found) x -= inner(x, f) * f;
        double nn = x.norm();
        if (nn < 1e-12) continue;
        x /= nn;
        double q = quality(m, x);
        if (q > best_q) {
          best_q = q;
          best = x;
        }
      }
      if (best_q >= c - kCountSlack) {
        found.push_back(best);
      } else {
        break;
      }
    }
    res.per_member_counts.push_back(static_cast<int>(found.size()));
    for (const auto& f : found) collect(f);
  }

  // Basis scan and random probes; every hit is polished by the same ascent
  // before entering the rank count (a raw kept sample carries bystander
  // components of size O(1) and would report the ambient dimension).
  for (int i = 0; i < n + trials; ++i) {
    Vec x = (i < n) ? project_perp(Vec(Mat::Identity(n, n).col(i)))
                    : random_perp();
    double nn = x.norm();
    if (nn < 1e-9) continue;
    x /= nn;
    for (const auto& [label, m] : family.members) {
      if (quality(m, x) >= c - kCountSlack) {
        Vec p = ascend(m, x, {});
        if (quality(m, p) >= c - kCountSlack) collect(p);
      }
    }
  }
  res.rank = static_cast<int>(collected.size());
  return res;
}

// ---------------------------------------------------------------------------
// Banded / isometry checks
// ---------------------------------------------------------------------------

BandedResult banded_check(const OperatorFamily& family, int K) {
  if (family.members.empty())
    throw ValidationError("banded_check: empty family");
  BandedResult res;
  for (const auto& [label, m] : family.members) {
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (j - i >= K && std::abs(m(i, j)) > 1e-12) {
          res.passed = false;
          res.violation = BandedViolation{label, i + 1, j + 1, m(i, j)};
          return res;
        }
      }
    }
  }
  res.passed = true;
  return res;
}

PreimageGrowthReport isometry_preimage_check(
    const OperatorFamily& family, const std::vector<Vec>& v_basis,
    const std::vector<int>& truncation_dims) {
  if (truncation_dims.empty())
    throw ValidationError("isometry_preimage_check: empty ladder");
  require_orthonormal(v_basis, "isometry_preimage_check");
  family.validate();

  PreimageGrowthReport rep;
  rep.beta = std::numeric_limits<double>::infinity();
  for (int n : truncation_dims) {
    Mat V = restrict_basis(v_basis, n, "isometry_preimage_check");
    std::vector<Vec> preimages;
    for (const auto& [label, m] : family.members) {
      Mat T = m.topLeftCorner(n, n);
      double smin = smallest_singular_value(T);
      if (smin < 1e-6)
        throw ValidationError("isometry_preimage_check: member " + label +
                              " not bounded below (sigma_min < 1e-6)");
      rep.beta = std::min(rep.beta, smin);
      Mat C = V.adjoint() * T;  // v x n
      Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeThinV);
      auto sv = svd.singularValues();
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) >= smin * (1.0 - 1e-6))
          preimages.push_back(svd.matrixV().col(i));
    }
    Mat C = stack_columns(preimages);
    // dim(S ^ V^perp) = dim S - dim P_V S
    int dim_s = numerical_rank(C, 1e-7);
    int dim_pv = numerical_rank(V.adjoint() * C, 1e-7);
    rep.growth_trace.emplace_back(n, dim_s - dim_pv);
  }
  const auto& gt = rep.growth_trace;
  rep.verdict = (gt.size() < 2 ||
                 gt[gt.size() - 1].second == gt[gt.size() - 2].second)
                    ? "stabilizing"
                    : "growing";
  return rep;
}

// ---------------------------------------------------------------------------
// Modulus estimation (vectors)
// ---------------------------------------------------------------------------

std::vector<double> default_delta_grid() {
  return {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2};
}

namespace {

// rho(Tx,Ty) = sum_i w_i |<T(x-y), h_i>|: cache H^adj T per member.
struct VectorObjective {
  Eigen::VectorXd w;
  std::vector<Mat> K;

  VectorObjective(const OperatorFamily& family, const MetricScheme& scheme) {
    w = scheme.weights();
    const Mat& H = scheme.h_matrix();
    for (const auto& [label, m] : family.members)
      K.push_back(H.adjoint() * m);
  }

  double input(const MetricScheme& scheme, const Vec& x, const Vec& y) const {
    return rho(x, y, scheme).value;
  }

  // max over members; optionally reports the argmax member.
  double eval(const Vec& x, const Vec& y, int* argmax = nullptr) const {
    Vec z = x - y;
    double best = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) {
      double v = (K[i] * z).cwiseAbs().dot(w);
      if (v > best) {
        best = v;
        if (argmax) *argmax = static_cast<int>(i);
      }
    }
    return best;
  }
};

// Consecutive abstract-index basis pairs (e_j, e_{j+1}), plus a few skips.
std::vector<std::pair<Vec, Vec>> structured_basis_pairs(
    const BasisIndexing& ix) {
  std::vector<std::pair<Vec, Vec>> out;
  long lo = (ix.kind == IndexKind::Natural) ? 1 : -(ix.max_level());
  long hi = (ix.kind == IndexKind::Natural) ? ix.truncation_dim
                                            : ix.max_level();
  for (long j = lo; j < hi; ++j) {
    if (!ix.retained(j) || !ix.retained(j + 1)) continue;
    if (j == 0 && ix.kind == IndexKind::Integer) continue;
    out.emplace_back(ix.basis_vector(j), ix.basis_vector(j + 1));
    if (ix.retained(j + 2) && j + 2 != 0)
      out.emplace_back(ix.basis_vector(j), ix.basis_vector(j + 2));
  }
  return out;
}

Vec random_ball_point(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  double n = v.norm();
  if (n < 1e-12) return Vec::Zero(dim);
  v /= n;
  if (u01(rng) < 0.5) v *= std::pow(u01(rng), 1.0 / dim);
  return v;
}

}  // namespace

ModulusCurve estimate_modulus_vectors(const OperatorFamily& family,
                                      const MetricScheme& scheme,
                                      const std::vector<double>& deltas,
                                      int budget, std::uint64_t seed) {
  if (family.members.empty())
    throw ValidationError("estimate_modulus_vectors: empty family");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (deltas[i] <= deltas[i - 1] || deltas[0] <= 0.0)
      throw ValidationError("estimate_modulus_vectors: deltas must be "
                            "positive increasing");
  if (budget < 100)
    throw ValidationError("estimate_modulus_vectors: budget < 100");

  VectorObjective obj(family, scheme);
  const int N = scheme.dim();
  auto structured = structured_basis_pairs(scheme.indexing);

  ModulusCurve curve;
  curve.deltas = deltas;
  curve.seed = seed;
  curve.samples_per_delta = budget;

  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    double best = 0.0;
    Vec bx = Vec::Zero(N), by = Vec::Zero(N);

    // Moves y toward x along the segment so that rho(x,y) = min(rho, delta);
    // rho is exactly linear along the segment and the ball is convex.
    auto admit = [&](const Vec& x, const Vec& y) -> std::pair<Vec, Vec> {
      double in = rho(x, y, scheme).value;
      if (in <= delta || in == 0.0) return {x, y};
      double t = (delta / in) * (1.0 - 1e-12);
      return {x, Vec(x + t * (y - x))};
    };
    auto consider = [&](const Vec& x0, const Vec& y0) {
      auto [x, y] = admit(x0, y0);
      if (rho(x, y, scheme).value > delta) return;
      double v = obj.eval(x, y);
      if (v > best) {
        best = v;
        bx = x;
        by = y;
      }
    };

    // Phase 1: structured pairs (as-is and scaled onto the constraint).
    double best_structured = -1.0;
    std::pair<Vec, Vec> top_structured;
    for (const auto& [x, y] : structured) {
      consider(x, y);
      double in = rho(x, y, scheme).value;
      if (in > 0) {
        double s = std::min(1.0, delta / in);
        Vec sx = s * x, sy = s * y;
        consider(sx, sy);
        double v = obj.eval(sx, sy);
        if (v > best_structured) {
          best_structured = v;
          top_structured = {sx, sy};
        }
      }
    }

    // Phase 2: seeded random pairs. The stream is a prefix-extension in the
    // budget, so a larger budget never loses candidates.
    std::mt19937_64 rng(seed ^ (0x51ed2700dcba1234ULL + di));
    double best_random = -1.0;
    std::pair<Vec, Vec> top_random;
    const int pick_window = std::min(budget, 1000);
    for (int i = 0; i < budget; ++i) {
      Vec x = random_ball_point(N, rng);
      Vec y = random_ball_point(N, rng);
      auto [ax, ay] = admit(x, y);
      if (rho(ax, ay, scheme).value > delta) continue;
      double v = obj.eval(ax, ay);
      if (v > best) {
        best = v;
        bx = ax;
        by = ay;
      }
      if (i < pick_window && v > best_random) {
        best_random = v;
        top_random = {ax, ay};
      }
    }

    // Phase 3: coordinate-perturbation ascent from the phase winners.
    std::mt19937_64 ls_rng(seed ^ (0xabcd0000417ULL + di));
    std::uniform_int_distribution<int> coord(0, N - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::pair<Vec, Vec>> starts;
    if (best_structured >= 0.0) starts.push_back(top_structured);
    if (best_random >= 0.0) starts.push_back(top_random);
    for (auto [x, y] : starts) {
      double cur = obj.eval(x, y);
      double step = 0.25;
      for (int it = 0; it < 50; ++it) {
        Vec yp = y;
        int k = coord(ls_rng);
        yp[k] += Complex(g(ls_rng), g(ls_rng)) * step;
        yp = norm_ball_project(yp);
        auto [ax, ay] = admit(x, yp);
        if (rho(ax, ay, scheme).value > delta) continue;
        double v = obj.eval(ax, ay);
        if (v > cur) {
          cur = v;
          x = ax;
          y = ay;
        } else {
          step *= 0.9;
        }
      }
      if (cur > best) {
        best = cur;
        bx = x;
        by = y;
      }
    }

    curve.omega_hat.push_back(best);
    curve.witness_pairs.emplace_back(bx, by);
  }

  // Lower bounds of a monotone function: isotonic pass.
  for (std::size_t i = 1; i < curve.omega_hat.size(); ++i)
    curve.omega_hat[i] = std::max(curve.omega_hat[i], curve.omega_hat[i - 1]);
  return curve;
}

// ---------------------------------------------------------------------------
// Modulus estimation (super-maps, possibly chained)
// ---------------------------------------------------------------------------

namespace {

struct MapChainFamily {
  // Each entry applies right-to-left: chain = {f, g} means A -> f(g(A)).
  std::vector<std::pair<std::string, std::vector<const SuperMap*>>> chains;
};

std::pair<Vec, Vec> chain_rank_one(const std::vector<const SuperMap*>& chain,
                                   Vec x, Vec y) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    auto [nx, ny] = (*it)->apply_rank_one(x, y);
    x = nx;
    y = ny;
  }
  return {x, y};
}

Mat chain_apply(const std::vector<const SuperMap*>& chain, Mat A) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) A = (*it)->apply(A);
  return A;
}

// d(map(x1 (x) y1), map(x2 (x) y2)), maps applied to each rank-one leg.
double chain_rank_one_gap(const std::vector<const SuperMap*>& chain,
                          const Vec& x1, const Vec& y1, const Vec& x2,
                          const Vec& y2, const MetricScheme& scheme) {
  auto [a, b] = chain_rank_one(chain, x1, y1);
  auto [c, d] = chain_rank_one(chain, x2, y2);
  return d_metric_rank_one(a, b, c, d, scheme).value;
}

Mat random_contraction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  double s = operator_norm(m);
  if (s > 1.0) m /= s;
  return m;
}

ModulusCurve modulus_chains(const MapChainFamily& fam,
                            const MetricScheme& scheme,
                            const std::vector<double>& deltas, int budget,
                            std::uint64_t seed) {
  if (fam.chains.empty())
    throw ValidationError("estimate_modulus_supermaps: empty map list");
  if (budget < 100)
    throw ValidationError("estimate_modulus_supermaps: budget < 100");
  const int N = scheme.dim();
  auto structured = structured_basis_pairs(scheme.indexing);

  ModulusCurve curve;
  curve.deltas = deltas;
  curve.seed = seed;
  curve.samples_per_delta = budget;

  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    double best = 0.0;
    Vec bx = Vec::Zero(N), by = Vec::Zero(N);

    // Rank-one candidates x(x)x vs y(x)y; the input distance scales exactly
    // as s^2 under (x,y) -> (sx,sy).
    auto consider_rank_one = [&](Vec x, Vec y) {
      double in = d_metric_rank_one(x, x, y, y, scheme).value;
      if (in > delta && in > 0.0) {
        double s = std::sqrt(delta / in) * (1.0 - 1e-12);
        x *= s;
        y *= s;
        in = d_metric_rank_one(x, x, y, y, scheme).value;
      }
      if (in > delta) return;
      for (const auto& [label, chain] : fam.chains) {
        double v = chain_rank_one_gap(chain, x, x, y, y, scheme);
        if (v > best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    };

    for (const auto& [x, y] : structured) consider_rank_one(x, y);

    std::mt19937_64 rng(seed ^ (0x7a11bead0000ULL + di));
    const int n_rank_one = (budget * 7) / 10;
    for (int i = 0; i < n_rank_one; ++i) {
      Vec x = random_ball_point(N, rng);
      Vec y = random_ball_point(N, rng);
      consider_rank_one(x, y);
    }

    // General contraction pairs, moved along the segment (d is exactly
    // linear there). Kept small: every evaluation is a matrix product.
    std::mt19937_64 rng2(seed ^ (0x6e6e6e112233ULL + di));
    const int n_general = std::min(budget - n_rank_one, 60);
    for (int i = 0; i < n_general; ++i) {
      Mat A = random_contraction(N, rng2);
      Mat B = random_contraction(N, rng2);
      double in = d_metric(A, B, scheme).value;
      if (in > delta && in > 0.0)
        B = A + (delta / in) * (1.0 - 1e-12) * (B - A);
      if (d_metric(A, B, scheme).value > delta) continue;
      for (const auto& [label, chain] : fam.chains) {
        double v =
            d_metric(chain_apply(chain, A), chain_apply(chain, B), scheme)
                .value;
        best = std::max(best, v);
      }
    }

    curve.omega_hat.push_back(best);
    curve.witness_pairs.emplace_back(bx, by);
  }

  for (std::size_t i = 1; i < curve.omega_hat.size(); ++i)
    curve.omega_hat[i] = std::max(curve.omega_hat[i], curve.omega_hat[i - 1]);
  return curve;
}

MapChainFamily single_chains(const std::vector<SuperMap>& maps) {
  MapChainFamily fam;
  for (const auto& m : maps) fam.chains.emplace_back(m.label,
                                                     std::vector{&m});
  return fam;
}

}  // namespace

ModulusCurve estimate_modulus_supermaps(const std::vector<SuperMap>& maps,
                                        const MetricScheme& scheme,
                                        const std::vector<double>& deltas,
                                        int budget, std::uint64_t seed) {
  return modulus_chains(single_chains(maps), scheme, deltas, budget, seed);
}

// ---------------------------------------------------------------------------
// Certificate search
// ---------------------------------------------------------------------------

std::optional<NonUecCertificate> certificate_search(
    const OperatorFamily& family, const MetricScheme& scheme, double delta_max,
    double gain_min, std::uint64_t seed, int budget) {
  if (delta_max <= 0.0 || gain_min <= 1.0)
    throw ValidationError(
        "certificate_search: need delta_max > 0 and gain_min > 1");
  family.validate();
  VectorObjective obj(family, scheme);
  const int N = scheme.dim();

  double best_gain = 0.0;
  NonUecCertificate cert;
  bool found = false;

  auto consider = [&](const Vec& x, const Vec& y) {
    double in = rho(x, y, scheme).value;
    if (in <= 0.0 || in > delta_max) return;
    int argmax = -1;
    double out = obj.eval(x, y, &argmax);
    double gain = out / std::max(in, std::numeric_limits<double>::epsilon());
    if (gain > best_gain) {
      best_gain = gain;
      cert.member_label = family.members[argmax].first;
      cert.x = x;
      cert.y = y;
      cert.input_dist = in;
      cert.output_dist = out;
      cert.gain = gain;
      cert.scheme_id = scheme.id();
      found = true;
    }
  };

  for (const auto& [x, y] : structured_basis_pairs(scheme.indexing)) {
    consider(x, y);
    // Net-point pairs double as structured candidates.
  }
  const int n_net = std::min<int>(static_cast<int>(scheme.prefix_size()), 40);
  for (int i = 0; i < n_net; ++i)
    for (int j = i + 1; j < n_net; ++j)
      consider(scheme.h_seq[i], scheme.h_seq[j]);

  std::mt19937_64 rng(seed);
  for (int i = 0; i < budget; ++i) {
    Vec x = random_ball_point(N, rng);
    Vec y = random_ball_point(N, rng);
    double in = rho(x, y, scheme).value;
    if (in > delta_max && in > 0.0) {
      y = x + (delta_max / in) * (1.0 - 1e-12) * (y - x);
    }
    consider(x, y);
  }

  // Local refinement of the incumbent (gain is scale-invariant along the
  // segment, so perturb the difference direction).
  if (found) {
    std::mt19937_64 ls(seed ^ 0xce57f1ca7eULL);
    std::uniform_int_distribution<int> coord(0, N - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    Vec x = cert.x, y = cert.y;
    for (int it = 0; it < 20; ++it) {
      Vec yp = y;
      yp[coord(ls)] += Complex(g(ls), g(ls)) * 0.05;
      yp = norm_ball_project(yp);
      double in = rho(x, yp, scheme).value;
      if (in > delta_max && in > 0.0)
        yp = x + (delta_max / in) * (1.0 - 1e-12) * (yp - x);
      consider(x, yp);
    }
  }

  if (!found || best_gain < gain_min) return std::nullopt;
  return cert;
}

std::optional<OperatorCertificate> certificate_search_supermaps(
    const std::vector<SuperMap>& maps, const MetricScheme& scheme,
    double delta_max, double gain_min, std::uint64_t seed, int budget) {
  if (delta_max <= 0.0 || gain_min <= 1.0)
    throw ValidationError(
        "certificate_search_supermaps: need delta_max > 0 and gain_min > 1");
  if (maps.empty())
    throw ValidationError("certificate_search_supermaps: empty map list");
  const int N = scheme.dim();

  double best_gain = 0.0;
  OperatorCertificate cert;
  bool found = false;

  auto consider = [&](const Vec& x, const Vec& y) {
    double in = d_metric_rank_one(x, x, y, y, scheme).value;
    if (in <= 0.0 || in > delta_max) return;
    for (const auto& m : maps) {
      auto [a, b] = m.apply_rank_one(x, x);
      auto [c, d] = m.apply_rank_one(y, y);
      double out = d_metric_rank_one(a, b, c, d, scheme).value;
      double gain = out / std::max(in, std::numeric_limits<double>::epsilon());
      if (gain > best_gain) {
        best_gain = gain;
        cert.member_label = m.label;
        cert.x = x;
        cert.y = y;
        cert.input_dist = in;
        cert.output_dist = out;
        cert.gain = gain;
        cert.scheme_id = scheme.id();
        found = true;
      }
    }
  };

  for (const auto& [x, y] : structured_basis_pairs(scheme.indexing))
    consider(x, y);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < budget; ++i) {
    Vec x = random_ball_point(N, rng);
    Vec y = random_ball_point(N, rng);
    double in = d_metric_rank_one(x, x, y, y, scheme).value;
    if (in > delta_max && in > 0.0) {
      double s = std::sqrt(delta_max / in) * (1.0 - 1e-12);
      x *= s;
      y *= s;
    }
    consider(x, y);
  }

  if (!found || best_gain < gain_min) return std::nullopt;
  return cert;
}

// ---------------------------------------------------------------------------
// EC = UEC check
// ---------------------------------------------------------------------------

EcUecReport ec_equals_uec_check(const OperatorFamily& family,
                                const MetricScheme& scheme, int base_points,
                                int budget, std::uint64_t seed) {
  if (budget < 100)
    throw ValidationError("ec_equals_uec_check: budget < 100");
  const auto deltas = default_delta_grid();
  EcUecReport rep;
  rep.uniform = estimate_modulus_vectors(family, scheme, deltas, budget, seed);

  const int N = scheme.dim();
  VectorObjective obj(family, scheme);

  std::vector<Vec> bases;
  bases.push_back(Vec::Zero(N));
  auto sampled = sample_unit_ball(N, std::max(base_points, 1), seed + 1);
  bases.insert(bases.end(), sampled.begin(), sampled.end());
  for (const auto& [wx, wy] : rep.uniform.witness_pairs) bases.push_back(wx);

  std::mt19937_64 rng(seed ^ 0xba5eba11ULL);
  for (const auto& base : bases) {
    ModulusCurve pc;
    pc.deltas = deltas;
    pc.seed = seed;
    pc.samples_per_delta = budget / 10;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      const double delta = deltas[di];
      double best = 0.0;
      auto consider = [&](Vec y) {
        double in = rho(base, y, scheme).value;
        if (in > delta && in > 0.0)
          y = base + (delta / in) * (1.0 - 1e-12) * (y - base);
        if (rho(base, y, scheme).value > delta) return;
        best = std::max(best, obj.eval(base, y));
      };
      for (int i = 0; i < std::max(budget / 10, 50); ++i)
        consider(random_ball_point(N, rng));
      // The uniform witnesses anchored at this base are legal candidates.
      for (std::size_t wi = 0; wi < rep.uniform.witness_pairs.size(); ++wi) {
        const auto& [wx, wy] = rep.uniform.witness_pairs[wi];
        if ((wx - base).norm() < 1e-14) consider(wy);
      }
      pc.omega_hat.push_back(best);
    }
    for (std::size_t i = 1; i < pc.omega_hat.size(); ++i)
      pc.omega_hat[i] = std::max(pc.omega_hat[i], pc.omega_hat[i - 1]);
    rep.pointwise.push_back(std::move(pc));
  }

  rep.pointwise_max.assign(deltas.size(), 0.0);
  for (const auto& pc : rep.pointwise)
    for (std::size_t di = 0; di < deltas.size(); ++di)
      rep.pointwise_max[di] = std::max(rep.pointwise_max[di],
                                       pc.omega_hat[di]);
  rep.uniform_bounded_by_pointwise = true;
  for (std::size_t di = 0; di < deltas.size(); ++di)
    if (rep.uniform.omega_hat[di] > rep.pointwise_max[di] + 0.05)
      rep.uniform_bounded_by_pointwise = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Composition check
// ---------------------------------------------------------------------------

CompositionReport composition_modulus_check(const OperatorFamily& f,
                                            const OperatorFamily& g,
                                            const MetricScheme& scheme,
                                            const std::vector<double>& deltas,
                                            int budget, std::uint64_t seed,
                                            int pair_cap) {
  if (f.dim() != g.dim())
    throw ValidationError("composition_modulus_check: dimension mismatch");
  if (static_cast<int>(f.size() * g.size()) > pair_cap)
    throw ValidationError(
        "composition_modulus_check: pairwise composition exceeds cap");

  CompositionReport rep;
  rep.g_curve = estimate_modulus_vectors(g, scheme, deltas, budget, seed);

  // Evaluate omega_F exactly at the arguments the bound needs.
  std::vector<double> args;
  for (double og : rep.g_curve.omega_hat) args.push_back(og + 0.05);
  std::vector<double> f_grid = deltas;
  f_grid.insert(f_grid.end(), args.begin(), args.end());
  std::sort(f_grid.begin(), f_grid.end());
  f_grid.erase(std::unique(f_grid.begin(), f_grid.end()), f_grid.end());
  rep.f_curve = estimate_modulus_vectors(f, scheme, f_grid, budget, seed);

  OperatorFamily fg;
  fg.indexing = f.indexing;
  fg.descriptor = "composition";
  for (const auto& [fl, fm] : f.members)
    for (const auto& [gl, gm] : g.members)
      fg.members.emplace_back(fl + "." + gl, fm * gm);
  rep.fg_curve = estimate_modulus_vectors(fg, scheme, deltas, budget, seed);

  auto f_at = [&](double arg) {
    for (std::size_t i = 0; i < f_grid.size(); ++i)
      if (std::abs(f_grid[i] - arg) < 1e-15) return rep.f_curve.omega_hat[i];
    // arg beyond the grid: fall back to the last value (isotonic curve).
    return rep.f_curve.omega_hat.back();
  };

  rep.inequality_holds = true;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    double bound = f_at(args[di]) + 0.05;
    rep.bound.push_back(bound);
    if (rep.fg_curve.omega_hat[di] > bound) rep.inequality_holds = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Automorphism correspondence
// ---------------------------------------------------------------------------

CorrespondenceVerdict automorphism_correspondence(
    const OperatorFamily& u_family, const MetricScheme& scheme,
    double delta_max, double gain_min, int budget, std::uint64_t seed) {
  CorrespondenceVerdict v;
  auto conj = supermap_family(u_family, SuperMapKind::Conjugation);

  v.vector_certificate =
      certificate_search(u_family, scheme, delta_max, gain_min, seed, budget);
  v.operator_certificate = certificate_search_supermaps(
      conj, scheme, delta_max, gain_min, seed, budget);

  if (v.vector_certificate) {
    const auto& vc = *v.vector_certificate;
    const SuperMap* map = nullptr;
    for (const auto& m : conj)
      if (m.label == vc.member_label) map = &m;
    if (map) {
      LiftedCertificate lift;
      lift.lifted.member_label = vc.member_label;
      lift.lifted.x = vc.x;
      lift.lifted.y = vc.y;
      lift.lifted.input_dist =
          d_metric_rank_one(vc.x, vc.x, vc.y, vc.y, scheme).value;
      auto [a, b] = map->apply_rank_one(vc.x, vc.x);
      auto [c, d] = map->apply_rank_one(vc.y, vc.y);
      lift.lifted.output_dist = d_metric_rank_one(a, b, c, d, scheme).value;
      lift.lifted.gain =
          lift.lifted.output_dist /
          std::max(lift.lifted.input_dist,
                   std::numeric_limits<double>::epsilon());
      lift.lifted.scheme_id = scheme.id();
      lift.valid = lift.lifted.output_dist >= 1e-4;
      v.lifted = lift;
    }
  }

  bool has_vec = v.vector_certificate.has_value();
  bool has_op = v.operator_certificate.has_value();
  v.agree = (has_vec == has_op);
  v.verdict = !v.agree ? "disagree"
                       : (has_vec ? "both witnessed" : "both none");
  return v;
}

}  // namespace ueclab
