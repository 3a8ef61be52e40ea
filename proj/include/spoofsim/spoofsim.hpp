// spoofsim - LiDAR spoofing attack capability simulation
// SPDX-License-Identifier: Apache-2.0

#ifndef SPOOFSIM_SPOOFSIM_HPP
#define SPOOFSIM_SPOOFSIM_HPP

#include "spoofsim/detector.hpp"
#include "spoofsim/errors.hpp"
#include "spoofsim/evaluation.hpp"
#include "spoofsim/geometry.hpp"
#include "spoofsim/injection.hpp"
#include "spoofsim/oriented_box.hpp"
#include "spoofsim/pc_io.hpp"
#include "spoofsim/profiles.hpp"
#include "spoofsim/removal.hpp"
#include "spoofsim/rng.hpp"
#include "spoofsim/scenario.hpp"
#include "spoofsim/vec3.hpp"

#endif  // SPOOFSIM_SPOOFSIM_HPP
