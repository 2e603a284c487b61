// Acceptance suite: one [PASS]/[FAIL] line per criterion 1-9, exit code is
// the number of failed criteria. Criterion 3 prints its sub-checks: the parts
// that hold numerically and the parts that do not are reported separately.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "encircle/config.hpp"
#include "encircle/equilibrium.hpp"
#include "encircle/potential.hpp"
#include "encircle/rng.hpp"
#include "encircle/sim.hpp"
#include "encircle/spectral.hpp"

using namespace encircle;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::pair<int, int>> kCases{{5, 4}, {6, 6}, {7, 5}, {8, 3}, {12, 4}};
const GameParams kParams{16.0, 50.0, 8.0, 7.0};

SystemState random_case_state(int m, int n, std::uint64_t seed) {
  return random_box_state(m, n, RandomBoxInit{3.0, 0.3}, seed);
}

double flat_norm(const SystemState& s) {
  double acc = 0.0;
  for (const Vec2& v : s.active) acc += v.norm2();
  for (const Vec2& v : s.passive) acc += v.norm2();
  return std::sqrt(acc);
}

// ---- criterion 1: HJB identity -------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (auto [m, n] : kCases) {
    const Topology topo = combined_topology(m, n);
    for (int s = 0; s < 100; ++s) {
      const SystemState st = random_case_state(m, n, derive_seed(101 * m + n, s));
      const double xn = flat_norm(st);
      const double bound = 1e-8 * (1.0 + xn * xn * xn * xn);
      for (int i = 0; i < m; ++i)
        worst = std::max(worst,
                         std::abs(hjb_residual(Group::Active, i, st, topo, kParams)) / bound);
      for (int j = 0; j < n; ++j)
        worst = std::max(worst,
                         std::abs(hjb_residual(Group::Passive, j, st, topo, kParams)) / bound);
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "HJB residual: worst |residual| / (1e-8*(1+||x||^4)) = " << worst << " over 500 states, "
     << dt << " s";
  report(1, worst <= 1.0 && dt < 10.0, os.str());
}

// ---- criterion 2: gradient vs central finite differences ------------------

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (auto [m, n] : kCases) {
    const Topology topo = combined_topology(m, n);
    const int N = 2 * (m + n);
    for (int s = 0; s < 50; ++s) {
      const SystemState st = random_case_state(m, n, derive_seed(202 * m + n, s));
      const std::vector<double> x = flatten(st);
      const std::vector<double> ga = c_active(st, topo, kParams) * x;
      const std::vector<double> gp = c_passive(st, topo, kParams) * x;
      double scale = 1.0;
      for (int i = 0; i < N; ++i)
        scale = std::max(scale, std::max(std::abs(ga[i]), std::abs(gp[i])));
      const double h = 1e-5;
      for (int i = 0; i < N; ++i) {
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const SystemState sp = unflatten(xp, m, n), sm = unflatten(xm, m, n);
        const double fda = (value_active(sp, topo, kParams) - value_active(sm, topo, kParams)) /
                           (2.0 * h);
        const double fdp = (value_passive(sp, topo, kParams) - value_passive(sm, topo, kParams)) /
                           (2.0 * h);
        worst = std::max(worst, std::abs(ga[i] - fda) / scale);
        worst = std::max(worst, std::abs(gp[i] - fdp) / scale);
      }
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "gradient FD: worst relative error = " << worst << " over 250 states, " << dt << " s";
  report(2, worst <= 1e-5 && dt < 10.0, os.str());
}

// ---- criterion 3: spectral certificate ------------------------------------

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  bool all = true;
  std::vector<std::string> sub;
  auto subcheck = [&](bool pass, const std::string& what) {
    all = all && pass;
    sub.push_back(std::string("  [") + (pass ? "pass" : "FAIL") + "] " + what);
  };
  for (auto [m, n] : kCases) {
    const DesiredConfiguration d = desired_configuration(m, n, kParams);
    const HessianPair hp = hessian(d.state, d.topology, kParams);
    const std::vector<double> x0 = d.coords();
    const SpectralReport ra = kernel_matches_tangent(hp.h_active, x0);
    const SpectralReport rp = kernel_matches_tangent(hp.h_passive, x0);
    std::ostringstream tag;
    tag << "(m=" << m << ",n=" << n << ") ";

    subcheck(ra.zero_count == 3 && ra.nonzero_all_positive,
             tag.str() + "active Hessian PSD with exactly 3 zero eigenvalues (zero_count=" +
                 std::to_string(ra.zero_count) + ")");
    {
      std::ostringstream os;
      os << tag.str() << "active kernel_residual < 1e-7 (actual " << ra.kernel_residual
         << "; kernel = translations + active-only rotation, not the joint tangent space)";
      subcheck(ra.kernel_residual < 1e-7, os.str());
    }
    {
      std::ostringstream os;
      os << tag.str() << "passive Hessian PSD with exactly 3 zero eigenvalues (zero_count="
         << rp.zero_count << ", min eigenvalue " << rp.eigenvalues.front()
         << "; actual kernel dim 2m+1 = " << 2 * m + 1 << ")";
      subcheck(rp.zero_count == 3 && rp.nonzero_all_positive, os.str());
    }
    {
      std::ostringstream os;
      os << tag.str() << "passive kernel_residual < 1e-7 (actual " << rp.kernel_residual << ")";
      subcheck(rp.kernel_residual < 1e-7, os.str());
    }

    Matrix g1(2 * m, 2 * m);
    for (int r = 0; r < 2 * m; ++r)
      for (int c = 0; c < 2 * m; ++c) g1(r, c) = hp.h_active(r, c);
    subcheck(zero_count(g1, 1e-8) == 1, tag.str() + "G_1^a has exactly 1 zero eigenvalue");
    if (m % 2 == 1) {
      std::vector<Matrix> blocks;
      for (int j = 0; j < m; ++j) {
        Matrix b(2, 2);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) b(r, c) = g1(r, 2 * j + c);
        blocks.push_back(b);
      }
      const Mat2c d0 = dk_matrices(BlockRotCirculant(m, Rot2::from_angle(2 * kPi / m), blocks))[0];
      const bool ok = std::abs(d0.e[0][0].real() - 3.0 * kParams.alpha1) < 1e-9 &&
                      std::abs(d0.e[0][1]) < 1e-9 && std::abs(d0.e[1][0]) < 1e-9 &&
                      std::abs(d0.e[1][1]) < 1e-9;
      subcheck(ok, tag.str() + "D_0 = alpha1*diag(3,0)");
    }
  }
  const double dt = seconds_since(t0);
  subcheck(dt < 5.0, "runtime < 5 s");
  std::ostringstream os;
  os << "spectral certificate (" << sub.size() << " sub-checks)";
  report(3, all, os.str());
  for (const std::string& s : sub) std::puts(s.c_str());
}

// ---- criterion 4: block-circulant eigendecomposition oracle ---------------

Matrix random_sym2(CounterRng& rng) {
  Matrix b(2, 2);
  b(0, 0) = rng.uniform(-1, 1);
  b(1, 1) = rng.uniform(-1, 1);
  b(0, 1) = b(1, 0) = rng.uniform(-1, 1);
  return b;
}

Matrix conjugate(const Matrix& b, Rot2 r) {
  const double c = r.cos(), s = r.sin();
  const double t00 = c * b(0, 0) - s * b(1, 0), t01 = c * b(0, 1) - s * b(1, 1);
  const double t10 = s * b(0, 0) + c * b(1, 0), t11 = s * b(0, 1) + c * b(1, 1);
  Matrix out(2, 2);
  out(0, 0) = t00 * c - t01 * s;
  out(0, 1) = t00 * s + t01 * c;
  out(1, 0) = t10 * c - t11 * s;
  out(1, 1) = t10 * s + t11 * c;
  return out;
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_eig = 0.0, worst_vec = 0.0;
  int instances = 0;
  for (int m = 2; m <= 8 && instances < 100; ++m) {
    for (int rep = 0; rep < 15 && instances < 100; ++rep, ++instances) {
      CounterRng rng(derive_seed(404, 100 * m + rep));
      const int k = static_cast<int>(rng.uniform(0, m));
      const Rot2 r = Rot2::from_angle(2.0 * kPi * k / m);
      std::vector<Matrix> blocks(m, Matrix(2, 2));
      blocks[0] = random_sym2(rng);
      if (m % 2 == 0) blocks[m / 2] = random_sym2(rng);
      for (int j = 1; 2 * j < m; ++j) {
        blocks[j] = random_sym2(rng);
        blocks[m - j] = conjugate(blocks[j], r.pow(-j));
      }
      const BlockRotCirculant brc(m, r, blocks);
      const std::vector<double> dk = dk_eigenvalues(brc);
      const SymEigen dense = jacobi_eigen(brc.assembled());
      for (int i = 0; i < 2 * m; ++i)
        worst_eig = std::max(worst_eig, std::abs(dk[i] - dense.values[i]));
      worst_vec = std::max(worst_vec, verify_eigvectors(brc));
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "block-circulant oracle: " << instances << " instances, worst eigenvalue gap "
     << worst_eig << ", worst eigenvector residual " << worst_vec << ", " << dt << " s";
  report(4, instances == 100 && worst_eig < 1e-9 && worst_vec < 1e-9 && dt < 5.0, os.str());
}

// ---- criterion 5: equilibrium stationarity --------------------------------

void criterion5() {
  double worst_u = 0.0, worst_drift = 0.0;
  bool ok = true;
  for (auto [m, n] : kCases) {
    const DesiredConfiguration d = desired_configuration(m, n, kParams);
    for (int i = 0; i < m; ++i)
      worst_u = std::max(worst_u, control_active(i, d.state, d.topology, kParams).norm());
    for (int j = 0; j < n; ++j)
      worst_u = std::max(worst_u, control_passive(j, d.state, d.topology, kParams).norm());

    SimConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.params = kParams;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.record_every = 1000;
    cfg.init_state = d.state;
    const TrajectoryRecord rec = simulate(cfg);
    worst_drift = std::max(worst_drift, rec.diagnostics.back().pattern_distance);
  }
  ok = worst_u < 1e-9 && worst_drift < 1e-9;
  std::ostringstream os;
  os << "stationarity: max control norm " << worst_u << ", max 1 s drift " << worst_drift;
  report(5, ok, os.str());
}

// ---- criterion 6: figure scenarios -----------------------------------------

struct ScenarioExpect {
  std::string file;
  bool encircled;  // active ring outside the passive ring at t_final
};

bool topology_edges_equal(const Topology& a, const Topology& b) {
  return std::set<std::pair<int, int>>(a.active_edges.begin(), a.active_edges.end()) ==
             std::set<std::pair<int, int>>(b.active_edges.begin(), b.active_edges.end()) &&
         std::set<std::pair<int, int>>(a.passive_edges.begin(), a.passive_edges.end()) ==
             std::set<std::pair<int, int>>(b.passive_edges.begin(), b.passive_edges.end());
}

TrajectoryRecord g_fig2a_traj;  // reused by criterion 7

void criterion6() {
  const std::vector<ScenarioExpect> scenarios{
      {"fig2a.cfg", true},  {"fig2b.cfg", false}, {"fig3a.cfg", true},
      {"fig3b.cfg", false}, {"fig4a.cfg", true},  {"fig4b.cfg", false},
  };
  bool all = true;
  std::ostringstream os;
  os << "figure scenarios:";
  for (const ScenarioExpect& sc : scenarios) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string verdict;
    bool ok = false;
    try {
      const RunConfig rc = load_run_config(std::string(SCENARIO_DIR) + "/" + sc.file);
      const TrajectoryRecord rec = simulate(rc.sim);
      const DesiredConfiguration d =
          desired_configuration(rc.sim.m, rc.sim.n, rc.sim.params);
      const Topology& topo = d.topology;  // the graph the simulation plays on
      const SystemState& fin = rec.states.back();

      const double rea = rec.diagnostics.back().radius_error_active / d.r_active;
      const double rep = rec.diagnostics.back().radius_error_passive / d.r_passive;
      const Vec2 ca = centroid(fin.active), cp = centroid(fin.passive);
      double ra_hat = 0.0, rp_hat = 0.0;
      for (const Vec2& v : fin.active) ra_hat += (v - ca).norm();
      for (const Vec2& v : fin.passive) rp_hat += (v - cp).norm();
      ra_hat /= fin.m();
      rp_hat /= fin.n();
      const ContainmentFlags cf = containment_check(d.r_active, d.r_passive, d.m, d.n);
      const bool order_ok = sc.encircled ? ra_hat > rp_hat : rp_hat > ra_hat;
      const bool contain_ok =
          sc.encircled ? cf.passive_in_active_hull : cf.active_in_passive_hull;
      const Topology derived = derive_topology_from_pattern(fin.active, fin.passive);
      const bool placement_ok = topology_edges_equal(derived, topo);
      const double secs = seconds_since(t0);
      ok = rea < 0.01 && rep < 0.01 && order_ok && contain_ok && placement_ok && secs < 30.0;
      std::ostringstream v;
      v << " " << sc.file << (ok ? "(ok" : "(FAIL") << ", rad err " << rea << "/" << rep << ", "
        << secs << " s)";
      verdict = v.str();
      if (sc.file == "fig2a.cfg") g_fig2a_traj = rec;
    } catch (const Error& e) {
      verdict = " " + sc.file + "(FAIL: " + e.what() + ")";
    }
    all = all && ok;
    os << verdict;
  }
  report(6, all, os.str());
}

// ---- criterion 7: centroid-gap decay ---------------------------------------

void criterion7() {
  const TrajectoryRecord& rec = g_fig2a_traj;
  if (rec.times.empty()) {
    report(7, false, "centroid-gap decay: fig2a trajectory unavailable");
    return;
  }
  size_t start = rec.times.size();
  for (size_t i = 0; i < rec.times.size(); ++i)
    if (rec.diagnostics[i].max_control_norm < 0.1) {
      start = i;
      break;
    }
  if (start + 3 >= rec.times.size()) {
    report(7, false, "centroid-gap decay: max_control_norm never fell below 0.1");
    return;
  }
  // absolute 1e-12 slack: once the gap hits the floating-point floor
  // (~1e-16) it jitters at roundoff level without ever growing materially
  bool monotone = true;
  for (size_t i = start; i + 1 < rec.times.size(); ++i)
    if (rec.diagnostics[i + 1].center_gap > rec.diagnostics[i].center_gap + 1e-12)
      monotone = false;
  // least-squares slope of ln(center_gap) vs t
  double st = 0, sy = 0, stt = 0, sty = 0;
  size_t cnt = 0;
  for (size_t i = start; i < rec.times.size(); ++i) {
    const double g = rec.diagnostics[i].center_gap;
    if (g <= 1e-13) break;  // fit only the decay, not the roundoff floor
    const double y = std::log(g);
    st += rec.times[i];
    sy += y;
    stt += rec.times[i] * rec.times[i];
    sty += rec.times[i] * y;
    ++cnt;
  }
  const double slope = (cnt * sty - st * sy) / (cnt * stt - st * st);
  std::ostringstream os;
  os << "centroid-gap decay: monotone=" << (monotone ? "yes" : "no") << ", log-linear slope "
     << slope << " over " << cnt << " snapshots from t=" << rec.times[start];
  report(7, monotone && slope < 0.0, os.str());
}

// ---- criterion 8: Table 1 consistency report --------------------------------

void criterion8() {
  bool ok = true;
  std::puts("  Table 1 consistency report (solver vs printed expression):");
  for (int m = 3; m <= 12; ++m) {
    const Topology topo = combined_topology(m, 4);
    const double solver = solve_radius_active(m, topo, kParams.alpha1, kParams.alpha2);
    const double table = table1_radius_active(m, kParams.alpha1, kParams.alpha2);
    const double rel = std::abs(table - solver) / solver;
    if (m % 2 == 0) {
      std::printf("    m=%2d (even): solver %.12g, table %.12g, rel gap %.2e -> %s\n", m, solver,
                  table, rel, rel < 1e-9 ? "match" : "MISMATCH");
      ok = ok && rel < 1e-9;
    } else {
      const double factor = std::pow(table / solver, 3);
      const double expected = table1_discrepancy_factor(m);
      const bool detected = rel > 1e-9 && std::abs(factor - expected) < 1e-9;
      std::printf(
          "    m=%2d (odd):  solver %.12g, table %.12g, (table/solver)^3 = %.12g "
          "= sin^2((m-1)pi/2m) -> %s\n",
          m, solver, table, factor, detected ? "mismatch detected, factor confirmed" : "FAIL");
      ok = ok && detected;
    }
  }
  for (int n = 3; n <= 12; ++n) {
    // independent bisection on the radial force balance of the passive ring
    const double b1 = kParams.beta1, b2 = kParams.beta2;
    auto radial = [&](double r) {
      const double spacing = 2.0 * r * std::sin(kPi / n);
      return b1 / (r * r) - 2.0 * b2 * spacing * r * (1.0 - std::cos(2.0 * kPi / n));
    };
    double lo = 1e-6, hi = 1e6;
    for (int it = 0; it < 200; ++it) (radial(0.5 * (lo + hi)) < 0.0 ? hi : lo) = 0.5 * (lo + hi);
    const double solver = 0.5 * (lo + hi);
    const double table = table1_radius_passive(n, b1, b2);
    const double rel = std::abs(table - solver) / solver;
    std::printf("    n=%2d (passive): solver %.12g, table %.12g, rel gap %.2e -> %s\n", n, solver,
                table, rel, rel < 1e-9 ? "match" : "MISMATCH");
    ok = ok && rel < 1e-9;
  }
  report(8, ok, "Table 1 consistency report (printed above)");
}

// ---- criterion 9: byte-identical repeated runs -------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void criterion9() {
  const fs::path base = fs::temp_directory_path() / "encircle_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "det.cfg";
  std::ofstream(cfg) << "m = 5\nn = 4\nalpha1 = 16\nalpha2 = 50\nbeta1 = 8\nbeta2 = 7\n"
                     << "dt = 1e-3\nt_final = 2\nseed = 11\nrecord_every = 100\n";
  bool ok = true;
  std::string detail = "determinism: ";
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = base / ("out" + std::to_string(rep));
    const std::string cmd = std::string(ENCIRCLE_BIN) + " run --config " + cfg.string() +
                            " --out-dir " + dir.string() + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      ok = false;
      detail += "run invocation failed";
      break;
    }
  }
  if (ok) {
    const std::string csv0 = slurp(base / "out0/run_traj.csv");
    const std::string csv1 = slurp(base / "out1/run_traj.csv");
    const std::string js0 = slurp(base / "out0/run_report.json");
    const std::string js1 = slurp(base / "out1/run_report.json");
    ok = !csv0.empty() && csv0 == csv1 && !js0.empty() && js0 == js1;
    std::ostringstream os;
    os << "determinism: CSV " << csv0.size() << " bytes, JSON " << js0.size()
       << " bytes, repeated run " << (ok ? "byte-identical" : "DIFFERS");
    detail = os.str();
  }
  report(9, ok, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
