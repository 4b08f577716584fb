#ifndef INCLUDE_GIBBSDP_GIBBSDP_HPP
#define INCLUDE_GIBBSDP_GIBBSDP_HPP

#include "coupling.hpp"
#include "diagnostics.hpp"
#include "parallel.hpp"
#include "models.hpp"
#include "order.hpp"
#include "partition.hpp"
#include "percolation.hpp"
#include "poisson.hpp"
#include "radius_law.hpp"
#include "rng.hpp"
#include "space.hpp"
#include "stats.hpp"
#include "thinning.hpp"

#endif  // INCLUDE_GIBBSDP_GIBBSDP_HPP
