// Timing comparison of the serial and OpenMP integration kernels on the
// discriminant-7, p = 2 instance. Usage: bench_integrate [level] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef ACLP_HAVE_OPENMP
#include <omp.h>
#endif

#include "aclp/harmonic.hpp"
#include "aclp/measure.hpp"
#include "aclp/quaternion.hpp"

using namespace aclp;

namespace {

double seconds(const std::function<void()>& run, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) run();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double ts, double tp, bool same) {
  std::printf("%-22s serial %8.4fs   parallel %8.4fs   speedup %5.2fx   %s\n", name, ts, tp,
              ts / tp, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  long m = argc > 1 ? std::atol(argv[1]) : 12;
  int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  if (m < 2 || reps < 1) {
    std::fprintf(stderr, "usage: %s [level >= 2] [reps >= 1]\n", argv[0]);
    return 1;
  }

  BTContext ctx(maximal_order(QuatAlg{-1, -7}), 2, m + 50);
  QuotientGraph G(ctx);
  EdgeMeasure mu(G, CocycleSpace(G).eigencocycle({}));

  FieldTag F = FieldTag::quadratic(2, -2);
  LogBranch br = LogBranch::iwasawa(F);
  const long prec = m + 40;
  Padic z1 = Padic::from_int(F, 1, prec) + Padic::gen(F, prec);
  Padic z2 = z1.conj();

  long balls = 0;
  mu.cover(m, [&](const CoverBall&) { ++balls; });
#ifdef ACLP_HAVE_OPENMP
  std::printf("level %ld, %ld balls, %d threads, %d reps\n", m, balls, omp_get_max_threads(),
              reps);
#else
  std::printf("level %ld, %ld balls, OpenMP off, %d reps\n", m, balls, reps);
#endif

  Integrand f = [&](const CoverBall& B) {
    return Padic::from_int(F, Int(1) + B.b * B.b + Int(B.k), kPrecInf);
  };

  {
    Integral a, b;
    double ts = seconds([&] { a = integrate_serial(mu, F, f, m); }, reps);
    double tp = seconds([&] { b = integrate(mu, F, f, m); }, reps);
    report("riemann sum", ts, tp, a.value.serialize() == b.value.serialize());
  }
  {
    Integral a, b;
    double ts = seconds([&] { a = mult_integrate_serial(mu, F, f, m); }, reps);
    double tp = seconds([&] { b = mult_integrate(mu, F, f, m); }, reps);
    report("riemann product", ts, tp, a.value.serialize() == b.value.serialize());
  }
  {
    Integral a, b;
    double ts = seconds([&] { a = coleman_line_integral_serial(mu, z1, z2, m, br); }, reps);
    double tp = seconds([&] { b = coleman_line_integral(mu, z1, z2, m, br); }, reps);
    report("log line integral", ts, tp, a.value.serialize() == b.value.serialize());
  }
  {
    Integral a, b;
    double ts = seconds([&] { a = mult_line_integral_serial(mu, z1, z2, m); }, reps);
    double tp = seconds([&] { b = mult_line_integral(mu, z1, z2, m); }, reps);
    report("mult line integral", ts, tp, a.value.serialize() == b.value.serialize());
  }
  return 0;
}
