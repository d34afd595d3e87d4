#pragma once

#include <span>

namespace spdc {

/// Exponentially scaled modified Bessel function of the first kind,
/// I_l(x) exp(-x), for integer l >= 0 and x >= 0. Finite for every x.
double bessel_i_scaled(int l, double x);

/// Fills out[k] = I_k(x) exp(-x) for k = 0 .. out.size() - 1.
///
/// Miller backward recurrence normalized with
/// exp(-x) (I_0(x) + 2 sum_k I_k(x)) = 1, so one pass yields every order.
void bessel_i_scaled_sequence(double x, std::span<double> out);

}  // namespace spdc
