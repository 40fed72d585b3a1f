#include "birm/kernels.hpp"

#include "kernels_detail.hpp"

namespace birm::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void scale(double* v, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= s;
}

void adagrad_pair_update(double* w, double* c, double* gw_acc, double* gc_acc,
                         std::size_t n, double fdiff, double lr) {
  for (std::size_t i = 0; i < n; ++i) {
    detail::adagrad_step(w[i], c[i], gw_acc[i], gc_acc[i], fdiff, lr);
  }
}

}  // namespace birm::kernels::scalar
