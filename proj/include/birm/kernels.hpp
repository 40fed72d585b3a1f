#pragma once

#include <cstddef>
#include <string>

// Dense inner-loop kernels shared by the trainer and the evaluators.
// Scalar implementations are the reference; vectorized variants are selected
// at runtime and equivalence-tested against them. The element-wise kernels
// (scale, adagrad_pair_update) are bit-identical across implementations;
// dot reassociates the sum and agrees only within rounding tolerance.
namespace birm::kernels {

enum class Isa { scalar, avx2 };

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void scale(double* v, std::size_t n, double s);
void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BIRM_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void scale(double* v, std::size_t n, double s);
void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr);
}  // namespace avx2
#endif

// Dispatched entry points. The active implementation is picked once from CPU
// capabilities (overridable via force_isa() or the BIRM_KERNELS env var).
double dot(const double* a, const double* b, std::size_t n);
void scale(double* v, std::size_t n, double s);
void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr);

Isa active_isa();
bool isa_supported(Isa isa);
void force_isa(Isa isa);  // throws UsageError if unsupported on this CPU
std::string isa_name(Isa isa);

}  // namespace birm::kernels
