// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phaselens/embed.hpp"
#include "phaselens/kdv.hpp"
#include "phaselens/lorenz.hpp"
#include "phaselens/ode.hpp"
#include "phaselens/pca.hpp"
#include "phaselens/pipeline.hpp"
#include "phaselens/presets.hpp"
#include "phaselens/spectral.hpp"

using namespace phaselens;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phaselens-acceptance-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<fs::path, std::string> snapshot_tree(const fs::path& root) {
  std::map<fs::path, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root)] = read_all(e.path());
  return out;
}

bool bounded_non_constant(const std::vector<double>& v) {
  double lo = v.front(), hi = v.front();
  for (double x : v) {
    if (!std::isfinite(x)) return false;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo > 1e-12 * std::max(1.0, std::fabs(hi));
}

Verdict rk4_order() {
  Verdict v;
  auto error_at = [](double h) {
    const std::size_t steps = static_cast<std::size_t>(std::lround(1.0 / h));
    const auto ys = ode::integrate([](double, const std::vector<double>& y) { return y; },
                                   ode::StepSpec{0.0, h, steps}, std::vector<double>{1.0});
    return std::fabs(ys.back()[0] - std::exp(1.0));
  };
  const double ratio = error_at(0.1) / error_at(0.05);
  v.check(ratio >= 14.0 && ratio <= 18.0, "ratio in [14,18]");
  v.note("ratio " + fmt("%.4f", ratio));
  return v;
}

Verdict fft_oracle() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> d;
  double worst_dft = 0.0, worst_round = 0.0;
  for (std::size_t n = 2; n <= 256; n *= 2)
    for (int trial = 0; trial < 100; ++trial) {
      spectral::Spectrum x(n);
      for (auto& c : x) c = {d(rng), d(rng)};
      const auto fast = spectral::fft(x);
      const auto slow = oracle::naive_dft(x);
      const auto back = spectral::ifft(fast);
      for (std::size_t i = 0; i < n; ++i) {
        worst_dft = std::max(worst_dft, std::abs(fast[i] - slow[i]));
        worst_round = std::max(worst_round, std::abs(back[i] - x[i]));
      }
    }
  v.check(worst_dft < 1e-10, "fft vs DFT < 1e-10");
  v.check(worst_round < 1e-12, "round trip < 1e-12");
  v.note("max |fft-dft| " + fmt("%.2e", worst_dft) + ", round trip " + fmt("%.2e", worst_round));
  return v;
}

Verdict kdv_exactness() {
  Verdict v;
  const kdv::Params p = kdv::Params::with_defaults(128, 16.0);
  v.check(p.half_length == std::numbers::pi && p.steps == 1000 && p.dt == 0.4 / (128.0 * 128.0), "default params");
  const auto field = kdv::simulate(p);
  const double t = field.times.back();
  const auto u = field.values.row(field.snapshot_count() - 1);
  double err = 0.0;
  for (std::size_t j = 0; j < p.grid; ++j)
    err = std::max(err, std::fabs(u[j] - oracle::periodic_soliton(field.grid[j], t, p.velocity, p.half_length)));
  const auto u0 = field.values.row(0);
  const double mass_drift = std::fabs(kdv::mass(u) - kdv::mass(u0)) / std::fabs(kdv::mass(u0));
  const double mom_drift = std::fabs(kdv::momentum(u) - kdv::momentum(u0)) / std::fabs(kdv::momentum(u0));
  v.check(err < 1e-4, "max error < 1e-4");
  v.check(mass_drift < 1e-8, "mass drift < 1e-8");
  v.check(mom_drift < 1e-5, "momentum drift < 1e-5");
  v.note("max error " + fmt("%.2e", err) + ", mass drift " + fmt("%.2e", mass_drift) + ", momentum drift " +
         fmt("%.2e", mom_drift));
  return v;
}

Verdict lorenz_properties() {
  Verdict v;
  const lorenz::Params p;
  const auto fps = lorenz::fixed_points(p);
  const auto origin = lorenz::rhs(p, fps.at(0));
  v.check(origin.x == 0.0 && origin.y == 0.0 && origin.z == 0.0, "origin residual exactly 0");
  double worst = 0.0;
  for (std::size_t i = 1; i < fps.size(); ++i) {
    worst = std::max(worst, lorenz::rhs(p, fps[i]).max_norm());
    v.check(std::fabs(std::fabs(fps[i].x) - std::sqrt(72.0)) < 1e-12 && std::fabs(fps[i].z - 27.0) < 1e-12,
            "fixed point at (+-sqrt72, +-sqrt72, 27)");
  }
  v.check(fps.size() == 3, "three fixed points");
  v.check(worst < 1e-12, "nontrivial residual < 1e-12");

  lorenz::Params sub = p;
  sub.r = 0.5;
  const auto decayed = lorenz::trajectory(sub, {0, 1, 0}, {0.0, 0.01, 5000}).back().max_norm();
  v.check(decayed < 1e-3, "r=0.5 max-norm < 1e-3 at t=50");

  const ode::StepSpec spec{0.0, 0.01, 1000};
  const lorenz::State start{0.3, 1.0, 2.0};
  const auto a = lorenz::trajectory(p, start, spec);
  const auto b = lorenz::trajectory(p, lorenz::symmetry_image(start), spec);
  double sym = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto img = lorenz::symmetry_image(a[i]);
    sym = std::max({sym, std::fabs(img.x - b[i].x), std::fabs(img.y - b[i].y), std::fabs(img.z - b[i].z)});
  }
  v.check(sym < 1e-8, "symmetry image within 1e-8");
  v.note("fixed-point residual " + fmt("%.1e", worst) + ", r=0.5 norm " + fmt("%.2e", decayed) +
         ", symmetry " + fmt("%.1e", sym));
  return v;
}

Verdict pca_oracle() {
  Verdict v;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(2, 10);
  double worst_res = 0.0, worst_cov = 0.0;
  bool ordered = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cols = std::min<std::size_t>(dim(rng), 8);
    const std::size_t rows = dim(rng);
    const auto x = oracle::random_matrix(rng, rows, cols);
    const auto z = pca::center_columns(x);
    const auto cov = pca::covariance(x);
    const auto ref = oracle::two_pass_covariance(x);
    for (std::size_t i = 0; i < cols; ++i)
      for (std::size_t j = 0; j < cols; ++j) worst_cov = std::max(worst_cov, std::fabs(cov(i, j) - ref(i, j)));

    const auto dec = pca::svd(cov);
    for (std::size_t i = 0; i < dec.singular_values.size(); ++i) {
      ordered = ordered && dec.singular_values[i] >= 0.0;
      if (i > 0) ordered = ordered && dec.singular_values[i] <= dec.singular_values[i - 1];
    }
    const auto direct = pca::svd(x);
    for (std::size_t i = 0; i < direct.singular_values.size(); ++i) {
      ordered = ordered && direct.singular_values[i] >= 0.0;
      if (i > 0) ordered = ordered && direct.singular_values[i] <= direct.singular_values[i - 1];
    }
    for (std::size_t k = 1; k <= cols; ++k) {
      const auto proj = pca::select_components(dec, pca::FixedCount{k});
      const auto reduced = pca::project(z, proj);
      const double residual = (z - reduced.entries * proj.projection.transposed()).frobenius_norm();
      worst_res = std::max(worst_res, std::fabs(residual - oracle::truncation_residual(z, k)));
    }
  }
  v.check(worst_res < 1e-8, "rank-k residual within 1e-8");
  v.check(worst_cov < 1e-12, "covariance within 1e-12");
  v.check(ordered, "singular values descending and >= 0");
  v.note("residual gap " + fmt("%.2e", worst_res) + ", covariance gap " + fmt("%.2e", worst_cov));
  return v;
}

Verdict hankel_properties() {
  Verdict v;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  bool anti = true, shape = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 300)(rng);
    const std::size_t w = std::uniform_int_distribution<std::size_t>(2, n / 2)(rng);
    std::vector<double> s(n);
    for (double& e : s) e = d(rng);
    const auto x = embed::hankel_embed(embed::TimeSeries(s, 1.0), w);
    const std::size_t L = x.entries.rows(), K = x.entries.cols();
    shape = shape && L == w && L + K == n + 1;
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < K; ++j) anti = anti && x.entries(i, j) == s[i + j];
  }
  v.check(shape, "L + K = N + 1");
  v.check(anti, "anti-diagonal constancy");
  bool rejected = true;
  const embed::TimeSeries s(std::vector<double>(100, 1.0), 1.0);
  for (std::size_t w : {0ul, 1ul, 51ul, 200ul}) {
    try {
      (void)embed::hankel_embed(s, w);
      rejected = false;
    } catch (const InvalidArgument&) {
    }
  }
  v.check(rejected, "window bound violations rejected");
  return v;
}

Verdict lorenz_figures() {
  Verdict v;
  const fs::path out = scratch("lorenz");
  const auto r = pipeline::run_experiment(presets::load("lorenz-fig123"), out);
  const pipeline::Artifact* spectrum = nullptr;
  const pipeline::Artifact* components = nullptr;
  for (const auto& a : r.files) {
    if (a.kind == "spectrum-csv") spectrum = &a;
    if (a.kind == "components-csv") components = &a;
  }
  v.check(spectrum && components, "spectrum and components emitted");
  if (!v.pass) return v;
  const auto table = csv::read_csv(spectrum->path);
  std::size_t series = 0;
  for (const auto& c : table.columns) series += c.name.rfind("window_", 0) == 0;
  v.check(series == 6, "6 spectrum series");
  const auto& s25 = table.at("window_25").values;
  bool non_increasing = true;
  for (std::size_t i = 1; i < s25.size(); ++i) non_increasing = non_increasing && s25[i] <= s25[i - 1];
  v.check(non_increasing, "window 25 spectrum non-increasing");
  const double ratio = s25.back() / s25.at(3);
  v.check(ratio < 0.1, "tail ratio last/4th < 0.1");
  const auto comp = csv::read_csv(components->path);
  v.check(comp.columns.size() == 3, "3 component columns");
  for (const auto& c : comp.columns) v.check(bounded_non_constant(c.values), c.name + " bounded, non-constant");
  v.check(r.count("portrait-svg") == 3 && r.count("reconstruction-svg") == 3, "3 + 3 portraits");
  v.note("tail ratio " + fmt("%.2e", ratio));
  fs::remove_all(out);
  return v;
}

Verdict kdv_reconstruction() {
  Verdict v;
  const auto cfg = presets::load("kdv-reconstruction-fig678");
  const fs::path a = scratch("kdv-a"), b = scratch("kdv-b");
  const auto r = pipeline::run_experiment(cfg, a);
  pipeline::run_experiment(cfg, b);
  for (const auto& run : cfg.kdv.runs) {
    std::size_t portraits = 0;
    for (const auto& f : r.files) {
      if (f.path.parent_path().parent_path().filename() != run.id()) continue;
      if (f.kind == "reconstruction-svg") ++portraits;
      if (f.kind == "components-csv") {
        const auto t = csv::read_csv(f.path);
        v.check(t.columns.size() == 4, run.id() + " has 4 components");
        for (const auto& c : t.columns) v.check(bounded_non_constant(c.values), run.id() + " " + c.name);
      }
    }
    v.check(portraits == 6, run.id() + " has 6 portraits");
  }
  v.check(snapshot_tree(a) == snapshot_tree(b), "byte-identical reruns");
  fs::remove_all(a);
  fs::remove_all(b);
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const auto& p : presets::all()) {
    const auto cfg = presets::load(std::string(p.name));
    const fs::path a = scratch("det-a"), b = scratch("det-b");
    pipeline::run_experiment(cfg, a);
    pipeline::run_experiment(cfg, b);
    const auto ta = snapshot_tree(a);
    v.check(!ta.empty() && ta == snapshot_tree(b), std::string(p.name) + " identical");
    fs::remove_all(a);
    fs::remove_all(b);
  }
  v.note(std::to_string(presets::all().size()) + " presets");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "RK4 fourth-order convergence", 1.0, rk4_order},
      {2, "FFT matches naive DFT", 5.0, fft_oracle},
      {3, "KdV soliton exactness and conservation", 30.0, kdv_exactness},
      {4, "Lorenz fixed points, decay and symmetry", 1e9, lorenz_properties},
      {5, "PCA against full-SVD oracle", 1e9, pca_oracle},
      {6, "Hankel embedding properties", 1e9, hankel_properties},
      {7, "Lorenz preset figure structure", 60.0, lorenz_figures},
      {8, "KdV reconstruction preset", 120.0, kdv_reconstruction},
      {9, "all presets deterministic", 1e9, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget_s) v.check(false, "runtime budget " + fmt("%g s", c.budget_s));
    failures += !v.pass;
    std::printf("criterion %d: %s  %s (%.2f s) %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
