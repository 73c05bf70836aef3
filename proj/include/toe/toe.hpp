#pragma once

#include "toe/competing_risks.hpp"
#include "toe/config.hpp"
#include "toe/csv.hpp"
#include "toe/experiment.hpp"
#include "toe/hazard.hpp"
#include "toe/model.hpp"
#include "toe/philox.hpp"
#include "toe/quadrature.hpp"
#include "toe/sampling.hpp"
#include "toe/stats.hpp"

#define TOE_VERSION "1.0.0"
