#include "ueclab/core_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ueclab {

bool BasisIndexing::retained(long k) const {
  if (kind == IndexKind::Natural) return k >= 1 && k <= truncation_dim;
  int pos = (k > 0) ? static_cast<int>(2 * k - 1) : static_cast<int>(-2 * k);
  return pos >= 0 && pos < truncation_dim;
}

int BasisIndexing::storage_of(long k) const {
  if (!retained(k))
    throw ValidationError("basis index " + std::to_string(k) +
                          " not retained in truncation of dim " +
                          std::to_string(truncation_dim));
  if (kind == IndexKind::Natural) return static_cast<int>(k - 1);
  return (k > 0) ? static_cast<int>(2 * k - 1) : static_cast<int>(-2 * k);
}

long BasisIndexing::abstract_of(int pos) const {
  if (pos < 0 || pos >= truncation_dim)
    throw ValidationError("storage position out of range");
  if (kind == IndexKind::Natural) return pos + 1;
  return (pos % 2 == 1) ? (pos + 1) / 2 : -(pos / 2);
}

int BasisIndexing::max_level() const {
  if (kind == IndexKind::Natural) return truncation_dim;
  int n = 0;
  while (retained(n + 1) && retained(-(n + 1))) ++n;
  return n;
}

std::vector<int> BasisIndexing::level_positions(int n) const {
  std::vector<int> out;
  if (kind == IndexKind::Natural) {
    for (long k = 1; k <= n; ++k) out.push_back(storage_of(k));
  } else {
    for (long k = -n; k <= n; ++k) out.push_back(storage_of(k));
  }
  return out;
}

Vec BasisIndexing::basis_vector(long k) const {
  Vec e = Vec::Zero(truncation_dim);
  e[storage_of(k)] = 1.0;
  return e;
}

std::string BasisIndexing::id() const {
  std::ostringstream os;
  os << (kind == IndexKind::Natural ? "natural" : "integer") << ":N"
     << truncation_dim;
  return os.str();
}

std::string MetricScheme::id() const {
  std::ostringstream os;
  os << indexing.id() << ":M" << h_seq.size() << ":L" << schedule.size();
  return os.str();
}

const Mat& MetricScheme::h_matrix() const {
  if (h_cache_.cols() == 0 && !h_seq.empty()) {
    int m = std::min<int>(static_cast<int>(h_seq.size()), kMetricTermCap);
    h_cache_.resize(dim(), m);
    w_cache_.resize(m);
    for (int i = 0; i < m; ++i) {
      h_cache_.col(i) = h_seq[i];
      w_cache_[i] = std::ldexp(1.0, -(i + 1));
    }
  }
  return h_cache_;
}

const Eigen::VectorXd& MetricScheme::weights() const {
  h_matrix();
  return w_cache_;
}

namespace {

// Embeds a vector given on subspace positions into the full space.
Vec embed(const Vec& sub, const std::vector<int>& positions, int dim) {
  Vec out = Vec::Zero(dim);
  for (std::size_t i = 0; i < positions.size(); ++i) out[positions[i]] = sub[i];
  return out;
}

Vec random_sphere_point(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(g(rng), g(rng));
  double n = v.norm();
  if (n < 1e-12) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

double nearest_dist(const Vec& p, const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) best = std::min(best, (p - q).norm());
  return best;
}

}  // namespace

MetricScheme build_scheme(const BasisIndexing& indexing, int L, int net_depth,
                          std::uint64_t seed) {
  if (L < 1) throw ValidationError("build_scheme: L must be >= 1");
  if (L > indexing.max_level())
    throw ValidationError(
        "build_scheme: L exceeds the truncation (scheme would reference "
        "absent basis vectors)");
  if (net_depth > 4)
    throw ValidationError(
        "build_scheme: net_depth > 4 refused, net size grows exponentially "
        "in n");
  if (net_depth > L) net_depth = L;

  MetricScheme s;
  s.indexing = indexing;
  const int N = indexing.truncation_dim;

  for (int n = 1; n <= L; ++n) {
    s.h_seq.push_back(indexing.basis_vector(n));
    s.schedule.push_back(static_cast<int>(s.h_seq.size()));  // a_n, 1-based

    if (n > net_depth) continue;

    // Greedy farthest-point net for F_n at radius 1/n, built in subspace
    // coordinates, then certified (and patched) with fresh samples.
    const std::vector<int> positions = indexing.level_positions(n);
    const int sub = static_cast<int>(positions.size());
    const double target = 0.85 / n;
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Coverage set: subspace coordinates of everything stored so far that
    // lies in F_n (earlier levels are nested, so all of it does).
    std::vector<Vec> net;
    for (const auto& h : s.h_seq) {
      Vec sv(sub);
      for (int i = 0; i < sub; ++i) sv[i] = h[positions[i]];
      net.push_back(sv);
    }

    auto draw = [&]() {
      Vec p = random_sphere_point(sub, rng);
      if (u01(rng) < 0.5) p *= std::pow(u01(rng), 1.0 / sub);
      return p;
    };

    const int pool_size = 4000 * sub;
    std::vector<Vec> pool(pool_size);
    for (auto& p : pool) p = draw();
    pool.push_back(Vec::Zero(sub));

    std::vector<double> mind(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
      mind[i] = nearest_dist(pool[i], net);
    std::size_t base = net.size();
    for (;;) {
      auto it = std::max_element(mind.begin(), mind.end());
      if (*it <= target) break;
      const Vec& p = pool[it - mind.begin()];
      net.push_back(p);
      for (std::size_t i = 0; i < pool.size(); ++i)
        mind[i] = std::min(mind[i], (pool[i] - net.back()).norm());
    }

    // Certification: fresh batches; any point beyond 0.95/n joins the net.
    double quality = 0.0;
    int clean = 0;
    for (int round = 0; round < 200 && clean < 3; ++round) {
      double worst = 0.0;
      bool dirty = false;
      for (int i = 0; i < 2000; ++i) {
        Vec p = draw();
        double dist = nearest_dist(p, net);
        if (dist > 0.95 / n) {
          net.push_back(p);
          dirty = true;
        } else {
          worst = std::max(worst, dist);
        }
      }
      if (dirty) {
        clean = 0;
      } else {
        ++clean;
        quality = std::max(quality, worst);
      }
    }
    s.net_quality.push_back(quality);

    for (std::size_t i = base; i < net.size(); ++i)
      s.h_seq.push_back(embed(net[i], positions, N));
  }

  s.tail_bound = std::ldexp(1.0, 1 - static_cast<int>(s.h_seq.size()));
  return s;
}

MetricValue rho(const Vec& x, const Vec& y, const MetricScheme& scheme) {
  if (x.size() != scheme.dim() || y.size() != scheme.dim())
    throw ValidationError("rho: vector dimension does not match scheme");
  const Mat& H = scheme.h_matrix();
  const Eigen::VectorXd& w = scheme.weights();
  Vec p = H.adjoint() * (x - y);
  MetricValue out;
  out.value = p.cwiseAbs().dot(w);
  out.truncation_error =
      2.0 * std::ldexp(1.0, -static_cast<int>(scheme.prefix_size()));
  return out;
}

MetricValue d_metric(const Mat& A, const Mat& B, const MetricScheme& scheme) {
  if (A.rows() != scheme.dim() || A.cols() != scheme.dim() ||
      B.rows() != scheme.dim() || B.cols() != scheme.dim())
    throw ValidationError("d_metric: operator dimension does not match scheme");
  const Mat& H = scheme.h_matrix();
  const Eigen::VectorXd& w = scheme.weights();
  Mat G = H.adjoint() * (A - B) * H;  // G(j,i) = <(A-B)h_i, h_j>
  MetricValue out;
  out.value = w.transpose() * G.cwiseAbs().matrix() * w;
  out.truncation_error =
      4.0 * std::ldexp(1.0, -static_cast<int>(scheme.prefix_size()));
  return out;
}

MetricValue d_metric_rank_one(const Vec& x1, const Vec& y1, const Vec& x2,
                              const Vec& y2, const MetricScheme& scheme) {
  const Mat& H = scheme.h_matrix();
  const Eigen::VectorXd& w = scheme.weights();
  // <(x (x) y) h_i, h_j> = <h_j, x>^* <h_i, y>^* ... concretely
  // (x (x) y) = x y^adj, so h_j^adj (x y^adj) h_i = (h_j^adj x)(y^adj h_i).
  Vec a = H.adjoint() * x1, b = H.adjoint() * y1;
  Vec c = H.adjoint() * x2, d = H.adjoint() * y2;
  const int m = static_cast<int>(w.size());
  double value = 0.0;
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      acc += std::abs(a[j] * std::conj(b[i]) - c[j] * std::conj(d[i])) * w[i];
    value += acc * w[j];
  }
  MetricValue out;
  out.value = value;
  out.truncation_error =
      4.0 * std::ldexp(1.0, -static_cast<int>(scheme.prefix_size()));
  return out;
}

Vec norm_ball_project(const Vec& x) {
  if (x.size() == 0) throw ValidationError("norm_ball_project: empty vector");
  double n = x.norm();
  return (n <= 1.0) ? x : Vec(x / n);
}

std::vector<Vec> sample_unit_ball(int space_dim, int count,
                                  std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample_unit_ball: count must be >= 1");
  if (space_dim < 1)
    throw ValidationError("sample_unit_ball: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec v = random_sphere_point(space_dim, rng);
    if (u01(rng) < 0.5) v *= std::pow(u01(rng), 1.0 / space_dim);
    out.push_back(v);
  }
  return out;
}

}  // namespace ueclab
