#pragma once

namespace mlplr {

enum class TransferKind { sigmoid };

/// phi and its first three derivatives at one point.
struct TransferDerivatives {
  double value;
  double d1;
  double d2;
  double d3;
};

/// Logistic sigmoid 1/(1+exp(-t)), evaluated without overflow for any finite t.
double sigmoid(double t) noexcept;

/// All four orders at once; cheaper than four separate calls.
TransferDerivatives transfer_all(double t, TransferKind kind = TransferKind::sigmoid) noexcept;

/// phi^(order)(t) for order in 0..3. Throws std::invalid_argument otherwise.
double transfer_eval(double t, int order, TransferKind kind = TransferKind::sigmoid);

}  // namespace mlplr
