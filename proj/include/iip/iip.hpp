#pragma once

#include "iip/compare.hpp"
#include "iip/config.hpp"
#include "iip/core_frames.hpp"
#include "iip/dynamics.hpp"
#include "iip/errors.hpp"
#include "iip/kepler.hpp"
#include "iip/oracles.hpp"
#include "iip/rate_geometric.hpp"
#include "iip/rate_legacy.hpp"
#include "iip/trajectory.hpp"
#include "iip/trajectory_csv.hpp"
