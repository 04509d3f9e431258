#pragma once

#include "bayesrat/dist.hpp"
#include "bayesrat/errors.hpp"
#include "bayesrat/known_omega.hpp"
#include "bayesrat/model.hpp"
#include "bayesrat/number.hpp"
#include "bayesrat/ops.hpp"
#include "bayesrat/partitions.hpp"
#include "bayesrat/population_sim.hpp"
#include "bayesrat/rationalizer.hpp"
