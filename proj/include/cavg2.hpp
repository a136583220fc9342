#ifndef CAVG2_HPP
#define CAVG2_HPP

#include "cavg2/analytic.hpp"
#include "cavg2/core.hpp"
#include "cavg2/lindblad.hpp"
#include "cavg2/moments.hpp"
#include "cavg2/pipeline.hpp"
#include "cavg2/rk4.hpp"
#include "cavg2/validation.hpp"

#endif  // CAVG2_HPP
