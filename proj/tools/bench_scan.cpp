// Benchmark comparing the serial reference certificate-box scan against the
// OpenMP kernel on a few representative workloads, followed by timings for
// the size sweep behind the refine command.  Both scan variants must return
// bitwise-identical grids; the benchmark re-checks that on every repetition.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cmw/cmw.hpp"
#include "cmw/instances.hpp"

using namespace cmw;

namespace {

CmInstance cm(InstanceKind kind) {
  InstanceSpec spec;
  spec.kind = std::move(kind);
  return generate_cm(spec);
}

double seconds_of(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

struct ScanCase {
  std::string name;
  CmInstance inst;
  ProductGrid inner;
  std::size_t nl = 0, np = 0;
};

ProductGrid dense_inner(const CmInstance& inst, double lo, double hi, int n) {
  ProductGrid g;
  g.v_points = inst.second.v_points;
  for (int i = 0; i <= n; ++i)
    g.w_points.push_back(lo + double(i) * (hi - lo) / double(n));
  return g;
}

void bench_scans(int reps) {
  std::vector<ScanCase> cases;
  {
    CmInstance inst = cm(Lemma34Params{});
    ProductGrid inner = inst.second;
    cases.push_back({"lemma34 own-grid 200x200", std::move(inst),
                     std::move(inner), 200, 200});
  }
  {
    CmInstance inst = cm(Example32Params{0.5, 8});
    ProductGrid inner = dense_inner(inst, 0.0, 1.0, 2000);
    cases.push_back({"example32 n=8 inner=2001 60x60", std::move(inst),
                     std::move(inner), 60, 60});
  }
  {
    CmInstance inst = cm(FatCantorParams{3, 64, 1.0});
    ProductGrid inner = inst.second;
    cases.push_back({"fat-cantor n=64 own-grid 40x40", std::move(inst),
                     std::move(inner), 40, 40});
  }

  std::printf("%-34s %10s %10s %8s %s\n", "case", "serial[s]", "openmp[s]",
              "speedup", "identical");
  for (const ScanCase& c : cases) {
    std::vector<double> ts, tp;
    bool identical = true;
    for (int r = 0; r < reps; ++r) {
      ScanResult a, b;
      ts.push_back(seconds_of([&] {
        a = scan_certificate_box_serial(c.inst, c.inner, 0.0, 10.0, c.nl,
                                        -10.0, 10.0, c.np);
      }));
      tp.push_back(seconds_of([&] {
        b = scan_certificate_box(c.inst, c.inner, 0.0, 10.0, c.nl, -10.0, 10.0,
                                 c.np);
      }));
      identical = identical && a.values == b.values &&
                  a.min_value == b.min_value;
    }
    const double s = median(ts), p = median(tp);
    std::printf("%-34s %10.4f %10.4f %7.2fx %s\n", c.name.c_str(), s, p,
                p > 0 ? s / p : 0.0, identical ? "yes" : "NO");
  }
}

void bench_refinement(int reps) {
  const auto family = [](int n) { return cm(Example32ModParams{4.0, n}); };
  std::printf("\n%-34s %10s %10s %10s\n", "refinement sweep", "sizes",
              "median[s]", "primal@max");
  for (const std::vector<int>& sizes :
       {std::vector<int>{4, 8, 16}, std::vector<int>{4, 8, 16, 32, 64}}) {
    std::vector<double> t;
    std::vector<RefinementRow> rows;
    for (int r = 0; r < reps; ++r)
      t.push_back(seconds_of([&] { rows = refinement_study(family, sizes); }));
    std::string label;
    for (int n : sizes) label += (label.empty() ? "" : ",") + std::to_string(n);
    std::printf("%-34s %10s %10.4f %10.6f\n", "example32-mod", label.c_str(),
                median(t), rows.back().primal);
  }
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 3;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc)
      reps = std::max(1, std::atoi(argv[++i]));
  }
#ifdef _OPENMP
  std::printf("openmp threads: %d, reps: %d\n\n", omp_get_max_threads(), reps);
#else
  std::printf("openmp: disabled (serial build), reps: %d\n\n", reps);
#endif
  bench_scans(reps);
  bench_refinement(reps);
  return 0;
}
