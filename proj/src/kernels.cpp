#include "birm/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "birm/errors.hpp"

namespace birm::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(BIRM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_startup_isa() {
  if (const char* env = std::getenv("BIRM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*scale)(double*, std::size_t, double);
  void (*adagrad)(double*, double*, double*, double*, std::size_t, double, double);
};

constexpr Table kScalarTable{scalar::dot, scalar::scale, scalar::adagrad_pair_update};
#if defined(BIRM_HAVE_AVX2_KERNELS)
constexpr Table kAvx2Table{avx2::dot, avx2::scale, avx2::adagrad_pair_update};
#endif

Isa g_isa = pick_startup_isa();

const Table& table_for(Isa isa) {
#if defined(BIRM_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return table_for(g_isa).dot(a, b, n);
}

void scale(double* v, std::size_t n, double s) { table_for(g_isa).scale(v, n, s); }

void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr) {
  table_for(g_isa).adagrad(w, c, gw_acc, gc_acc, n, fdiff, lr);
}

Isa active_isa() { return g_isa; }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw UsageError("kernel ISA '" + isa_name(isa) + "' not supported on this CPU");
  }
  g_isa = isa;
}

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace birm::kernels
