#pragma once

#include "drawrec/model.hpp"

namespace drawrec {

// Dense matrix exponential by scaling and squaring with diagonal Pade
// approximants (orders 3/5/7/9/13 selected from the 1-norm). Accurate to
// about 1e-14 relative for the moderately sized generators used here.
// Throws Error(NonFinite) if the input contains NaN or Inf.
Matrix matrix_exponential(const Matrix& m);

}  // namespace drawrec
