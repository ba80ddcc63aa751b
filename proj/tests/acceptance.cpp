// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not read from configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "ueclab/report.hpp"

using namespace ueclab;

namespace {

int failures = 0;

void report(int num, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", num, name,
              detail.c_str());
  if (!ok) ++failures;
}

Mat random_gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

Mat random_contraction(int dim, std::mt19937_64& rng) {
  Mat m = random_gaussian(dim, rng);
  return m / operator_norm(m);
}

// Strictly lower triangular contraction: zero at and above the diagonal.
Mat random_banded_contraction(int dim, std::mt19937_64& rng) {
  Mat m = random_gaussian(dim, rng);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m(i, j) = 0.0;
  double s = operator_norm(m);
  if (s > 1.0) m /= s;
  return m;
}

// 1: metric axioms on 1000 seeded triples, plus norm domination.
void criterion_1() {
  BasisIndexing ix{IndexKind::Natural, 16};
  auto s = build_scheme(ix, 8, 1, 2);
  auto pts = sample_unit_ball(16, 3000, 77);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const Vec &x = pts[3 * t], &y = pts[3 * t + 1], &z = pts[3 * t + 2];
    double rxy = rho(x, y, s).value;
    if (rxy != rho(y, x, s).value) ++bad;
    if (rxy > rho(x, z, s).value + rho(z, y, s).value + 1e-12) ++bad;
    if (rxy > (x - y).norm() + 1e-12) ++bad;
    Mat A = rank_one(x, y), B = rank_one(y, z), C = rank_one(z, x);
    double dab = d_metric(A, B, s).value;
    if (dab != d_metric(B, A, s).value) ++bad;
    if (dab > d_metric(A, C, s).value + d_metric(C, B, s).value + 1e-12)
      ++bad;
  }
  report(1, "metric axioms (1000 triples)", bad == 0,
         "violations=" + std::to_string(bad));
}

// 2: schedule containment exact for n <= L; sampled 1/n-net for n <= 2.
void criterion_2() {
  BasisIndexing ix{IndexKind::Natural, 12};
  const int L = 6;
  auto s = build_scheme(ix, L, 2, 3);
  bool contained = true;
  for (int n = 1; n <= L; ++n)
    for (int i = 0; i < s.schedule[n - 1]; ++i)
      for (int pos = n; pos < 12; ++pos)
        if (std::abs(s.h_seq[i][pos]) != 0.0) contained = false;

  std::mt19937_64 rng(909);
  std::normal_distribution<double> g(0.0, 1.0);
  int violations = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int t = 0; t < 10000; ++t) {
      Vec u = Vec::Zero(12);
      for (int i = 0; i < n; ++i) u[i] = Complex(g(rng), g(rng));
      u /= u.norm();
      double best = 1e9;
      for (const auto& h : s.h_seq) best = std::min(best, (u - h).norm());
      if (best > 1.0 / n) ++violations;
    }
  }
  report(2, "scheme containment + 1/n-net", contained && violations == 0,
         "containment=" + std::string(contained ? "exact" : "broken") +
             " net_violations=" + std::to_string(violations));
}

// 3: shift certificate on the integer truncation, c0 from the scheme.
void criterion_3() {
  BasisIndexing ix{IndexKind::Integer, 128};
  auto s = build_scheme(ix, 41, 0, 2);
  double c0 = std::ldexp(1.0, -s.schedule.front());
  bool monotone = true, small_found = false, output_ok = true;
  Mat S = left_shift(ix);
  double prev = 1e9;
  for (int k = 1; k <= 40; ++k) {
    double in = rho(ix.basis_vector(k), ix.basis_vector(k + 1), s).value;
    if (in >= prev) monotone = false;
    prev = in;
    if (in < 1e-3) small_found = true;
    Mat Sk = Mat::Identity(128, 128);
    for (int i = 0; i < k; ++i) Sk = S * Sk;
    double out = rho(Vec(Sk * ix.basis_vector(k)),
                     Vec(Sk * ix.basis_vector(k + 1)), s)
                     .value;
    if (out < c0) output_ok = false;
  }
  bool ok = monotone && small_found && output_ok && c0 >= 0.25;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "c0=%g monotone=%d below_1e-3=%d outputs>=c0=%d", c0, monotone,
                small_found, output_ok);
  report(3, "shift certificate, scheme c0", ok, buf);
}

// 4: banded forward shifts pass; adjoint shifts stabilize at 10 for a fixed
// family but grow like dim/2 when the family scales with the truncation.
void criterion_4() {
  BasisIndexing ix{IndexKind::Natural, 64};
  bool banded_ok = banded_check(right_shift_powers(ix, 10), 0).passed;

  auto fixed = adjoint_right_shift_powers(ix, 10);
  std::vector<Vec> V = {ix.basis_vector(1)};
  auto rep = dim_criterion(fixed, V, 0.5, {16, 32, 64});
  bool fixed_ok = rep.container_dim == 10 && rep.verdict == "stabilizing";
  for (const auto& [n, c] : rep.growth_trace) fixed_ok = fixed_ok && c == 10;

  auto scaled = adjoint_right_shift_powers(ix, 32);  // n_max = dim/2
  auto rep2 = dim_criterion(scaled, V, 0.5, {32, 64});
  bool scaled_ok = rep2.container_dim == 32 && rep2.verdict == "growing";

  report(4, "shift dichotomy", banded_ok && fixed_ok && scaled_ok,
         "banded=" + std::to_string(banded_ok) +
             " fixed_container=" + std::to_string(rep.container_dim) +
             " scaled_container=" + std::to_string(rep2.container_dim) + "/" +
             rep2.verdict);
}

// 5: SVD counts vs the independent oracle on 50 random 12-dim instances.
void criterion_5() {
  std::mt19937_64 rng(501);
  int equal = 0, total = 0;
  bool dominated = true;
  for (int inst = 0; inst < 50; ++inst) {
    OperatorFamily fam;
    fam.indexing = BasisIndexing{IndexKind::Natural, 12};
    for (int m = 0; m < 3; ++m)
      fam.members.emplace_back("T" + std::to_string(m),
                               random_contraction(12, rng));
    std::vector<Vec> V = {fam.indexing.basis_vector(1),
                          fam.indexing.basis_vector(2),
                          fam.indexing.basis_vector(3)};
    auto rep = dim_criterion(fam, V, 0.5, {12});
    auto orc = dim_criterion_oracle(fam, V, 0.5, 200, 5000 + inst);
    for (std::size_t m = 0; m < rep.per_member.size(); ++m) {
      int svd = rep.per_member[m].count_at_least_c;
      int ora = orc.per_member_counts[m];
      if (svd < ora) dominated = false;
      if (svd == ora) ++equal;
      ++total;
    }
  }
  bool ok = dominated && equal * 100 >= total * 95;
  report(5, "oracle agreement (50 instances)", ok,
         "dominated=" + std::to_string(dominated) + " equal=" +
             std::to_string(equal) + "/" + std::to_string(total));
}

// 6: strictly banded families admit no certificate; shifts do.
void criterion_6() {
  BasisIndexing ix{IndexKind::Natural, 32};
  auto scheme = build_scheme(ix, 20, 0, 2);
  std::mt19937_64 rng(601);
  int spurious = 0;
  for (int f = 0; f < 20; ++f) {
    OperatorFamily fam;
    fam.indexing = ix;
    for (int m = 0; m < 2; ++m)
      fam.members.emplace_back("B" + std::to_string(m),
                               random_banded_contraction(32, rng));
    if (certificate_search(fam, scheme, 1e-2, 10.0, 600 + f, 10000))
      ++spurious;
  }

  BasisIndexing zx{IndexKind::Integer, 128};
  auto zscheme = build_scheme(zx, 41, 0, 2);
  auto shifts = left_shift_powers(zx, 40);
  auto cert = certificate_search(shifts, zscheme, 1e-2, 10.0, 6, 10000);
  bool shift_ok = cert.has_value() && cert->gain >= 10.0;

  report(6, "banded none / shift certificate", spurious == 0 && shift_ok,
         "spurious=" + std::to_string(spurious) +
             " shift_gain=" + (cert ? std::to_string(cert->gain) : "none"));
}

// 7: composed modulus bounded by the composed bound on 10 banded pairs.
void criterion_7() {
  BasisIndexing ix{IndexKind::Natural, 16};
  auto scheme = build_scheme(ix, 10, 0, 2);
  std::mt19937_64 rng(701);
  int holds = 0;
  for (int p = 0; p < 10; ++p) {
    OperatorFamily f, g;
    f.indexing = g.indexing = ix;
    for (int m = 0; m < 2; ++m) {
      f.members.emplace_back("F" + std::to_string(m),
                             random_banded_contraction(16, rng));
      g.members.emplace_back("G" + std::to_string(m),
                             random_banded_contraction(16, rng));
    }
    auto rep = composition_modulus_check(f, g, scheme, default_delta_grid(),
                                         400, 700 + p);
    if (rep.inequality_holds) ++holds;
  }
  report(7, "composition inequality (10 pairs)", holds == 10,
         "holds=" + std::to_string(holds) + "/10");
}

// 8: automorphism correspondence for the multiplication subgroup.
void criterion_8() {
  const int n_modes = 129;
  std::vector<double> ts;
  for (int k = -40; k <= 40; ++k) ts.push_back(k);
  auto fam = mult_group_family(ts, n_modes);
  auto scheme =
      build_scheme(BasisIndexing{IndexKind::Integer, n_modes}, 41, 0, 2);
  auto v = automorphism_correspondence(fam, scheme, 1e-2, 10.0, 2000, 8);
  bool witnessed = v.verdict == "both witnessed";
  bool lift_ok = v.lifted.has_value() && v.lifted->valid &&
                 v.lifted->lifted.output_dist >= 1e-4;

  auto tiny = mult_group_family({-2e-3, -1e-3, 1e-3, 2e-3}, 33);
  auto small_scheme =
      build_scheme(BasisIndexing{IndexKind::Integer, 33}, 10, 0, 2);
  auto v2 =
      automorphism_correspondence(tiny, small_scheme, 1e-2, 10.0, 10000, 8);
  bool none_ok = v2.verdict == "both none";

  report(8, "automorphism correspondence", witnessed && lift_ok && none_ok,
         "subgroup=" + v.verdict + " lift_valid=" + std::to_string(lift_ok) +
             " near_identity=" + v2.verdict);
}

// 9: d(x_n (x) x_n, x (x) x) monotone below 1e-3 for x_n -> x weakly.
void criterion_9() {
  BasisIndexing ix{IndexKind::Natural, 40};
  auto scheme = build_scheme(ix, 30, 0, 2);
  Vec x = ix.basis_vector(1) / std::sqrt(2.0);
  bool monotone = true;
  double prev = 1e18, last = 0.0;
  for (int n = 5; n <= 25; ++n) {
    Vec xn = (ix.basis_vector(1) + ix.basis_vector(n)) / std::sqrt(2.0);
    last = d_metric_rank_one(xn, xn, x, x, scheme).value;
    if (last >= prev) monotone = false;
    prev = last;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "monotone=%d final=%.3g", monotone, last);
  report(9, "rank-one weak convergence", monotone && last < 1e-3, buf);
}

// 10: uniform modulus bounded by the pointwise maximum plus slack.
void criterion_10() {
  BasisIndexing ix{IndexKind::Natural, 12};
  auto scheme = build_scheme(ix, 8, 0, 2);
  std::mt19937_64 rng(1001);
  int bounded = 0;
  for (int f = 0; f < 5; ++f) {
    OperatorFamily fam;
    fam.indexing = ix;
    for (int m = 0; m < 2; ++m)
      fam.members.emplace_back("T" + std::to_string(m),
                               random_contraction(12, rng));
    auto rep = ec_equals_uec_check(fam, scheme, 3, 300, 1000 + f);
    if (rep.uniform_bounded_by_pointwise) ++bounded;
  }
  report(10, "EC = UEC on the ball (5 families)", bounded == 5,
         "bounded=" + std::to_string(bounded) + "/5");
}

// 11: byte-identical reports (minus wall time) and curve CSVs.
void criterion_11() {
  json doc = {
      {"space", {{"indexing", "integer"}, {"dims", {16, 32}}}},
      {"scheme", {{"L", 12}, {"net_depth", 0}, {"seed", 7}}},
      {"family", {{"descriptor", "left_shift_powers"}, {"k_max", 5}}},
      {"analyses",
       json::array(
           {{{"type", "modulus"}, {"budget", 300}, {"seed", 5}},
            {{"type", "ec_uec"},
             {"base_points", 2},
             {"budget", 300},
             {"seed", 5}}})}};
  auto cfg = ExperimentConfig::parse(doc);
  json a = run_experiment(cfg), b = run_experiment(cfg);
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  bool reports_equal = a.dump() == b.dump();

  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "ueclab_acceptance_curves";
  fs::remove_all(dir);
  auto fa = emit_curves(a, (dir / "a").string());
  auto fb = emit_curves(b, (dir / "b").string());
  bool csv_equal = fa.size() == fb.size();
  for (std::size_t i = 0; csv_equal && i < fa.size(); ++i) {
    std::ifstream ia(fa[i]), ib(fb[i]);
    std::string sa((std::istreambuf_iterator<char>(ia)), {});
    std::string sb((std::istreambuf_iterator<char>(ib)), {});
    csv_equal = sa == sb && !sa.empty();
  }
  fs::remove_all(dir);
  report(11, "determinism (reports + CSVs)", reports_equal && csv_equal,
         "reports_equal=" + std::to_string(reports_equal) +
             " csv_equal=" + std::to_string(csv_equal));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
