#pragma once

namespace rgflow {

/// The two real branches of w e^w = z.
enum class Branch { principal, minus_one };

const char* to_string(Branch b);

/// Coefficient of z^n in the Taylor series of the principal branch at 0.
double w_series_coefficient(int n);

/// Real Lambert W. The principal branch covers z >= -1/e with w >= -1, the
/// minus_one branch covers -1/e <= z < 0 with w <= -1.
double lambert_w(double z, Branch branch);

/// W(sign * exp(log_abs_z)) for arguments that over- or underflow a double.
double lambert_w_log(double log_abs_z, int sign, Branch branch);

}  // namespace rgflow
