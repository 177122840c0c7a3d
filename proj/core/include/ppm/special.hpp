#pragma once

namespace ppm::special {

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// pi/2 - Si(x), accurate for large x where the subtraction would cancel.
double sine_integral_complement(double x);

}  // namespace ppm::special
