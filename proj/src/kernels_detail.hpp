#pragma once

#include <cmath>
#include <cstddef>

namespace birm::kernels::detail {

// One AdaGrad step for a single (word, context) coordinate pair.
// Gradients are taken from the pre-update values of both vectors; the
// accumulator grows before the parameter moves. Shared by the scalar kernel
// and the vector kernels' tail loops so all implementations agree bit-exactly
// (both TUs build with -ffp-contract=off).
inline void adagrad_step(double& w, double& c, double& gw_acc, double& gc_acc,
                         double fdiff, double lr) {
  const double gw = fdiff * c;
  const double gc = fdiff * w;
  gw_acc += gw * gw;
  gc_acc += gc * gc;
  w -= lr * gw / std::sqrt(gw_acc);
  c -= lr * gc / std::sqrt(gc_acc);
}

}  // namespace birm::kernels::detail
