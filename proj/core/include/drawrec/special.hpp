#pragma once

namespace drawrec {

// Digamma and trigamma for strictly positive arguments, via upward recurrence
// into the asymptotic regime followed by the Bernoulli series. Absolute error
// is around 1e-13 across (0, inf); both return garbage for x <= 0.
double digamma(double x);
double trigamma(double x);

}  // namespace drawrec
