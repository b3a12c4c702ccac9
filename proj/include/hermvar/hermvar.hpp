#ifndef HERMVAR_HERMVAR_HPP
#define HERMVAR_HERMVAR_HPP

#include "hermvar/distances.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/hermite.hpp"
#include "hermvar/kernel_norms.hpp"
#include "hermvar/malliavin.hpp"
#include "hermvar/montecarlo.hpp"
#include "hermvar/rng.hpp"
#include "hermvar/variations.hpp"

#endif  // HERMVAR_HERMVAR_HPP
