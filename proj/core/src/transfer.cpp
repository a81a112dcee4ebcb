#include "mlplr/transfer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlplr {

double sigmoid(double t) noexcept {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

TransferDerivatives transfer_all(double t, TransferKind) noexcept {
  // p = phi(t), q = 1 - phi(t) = phi(-t); both computed stably so that the
  // derivatives keep full relative precision in the tails.
  const double p = sigmoid(t);
  const double q = sigmoid(-t);
  const double d1 = p * q;
  return {p, d1, d1 * (q - p), d1 * (1.0 - 6.0 * d1)};
}

double transfer_eval(double t, int order, TransferKind kind) {
  const auto all = transfer_all(t, kind);
  switch (order) {
    case 0: return all.value;
    case 1: return all.d1;
    case 2: return all.d2;
    case 3: return all.d3;
    default:
      throw std::invalid_argument("transfer_eval: order must be in 0..3, got " +
                                  std::to_string(order));
  }
}

}  // namespace mlplr
