#ifndef CALOREX_CALOREX_HPP
#define CALOREX_CALOREX_HPP

#include "calorex/caloric.hpp"
#include "calorex/config.hpp"
#include "calorex/error.hpp"
#include "calorex/fft.hpp"
#include "calorex/grid.hpp"
#include "calorex/kernel_cache.hpp"
#include "calorex/kernel_table.hpp"
#include "calorex/kernels.hpp"
#include "calorex/model.hpp"
#include "calorex/nlie.hpp"
#include "calorex/oracle.hpp"
#include "calorex/sweep.hpp"
#include "calorex/thermo.hpp"
#include "calorex/validation.hpp"
#include "calorex/version.hpp"

#endif  // CALOREX_CALOREX_HPP
