#pragma once

namespace thermalink {

// Exponential integral E1(z) = Gamma[0, z] = int_z^inf e^-t / t dt, z > 0.
double exp1(double z);

// exp(z) * E1(z), evaluated without forming exp(z); usable up to z ~ 1e8.
double exp1_scaled(double z);

// Upsilon(x) = e^{1/(8x)} Gamma[0, 1/(8x)] / (8x) = z e^z E1(z) with z = 1/(8x).
// Strictly decreasing from 1 (x -> 0+) to 0 (x -> inf).
double upsilon(double x);

}  // namespace thermalink
