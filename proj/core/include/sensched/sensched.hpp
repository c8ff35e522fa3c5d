#pragma once

#include "sensched/bounds.hpp"
#include "sensched/dutycycle.hpp"
#include "sensched/errors.hpp"
#include "sensched/heuristics.hpp"
#include "sensched/mdp.hpp"
#include "sensched/model.hpp"
#include "sensched/schedule.hpp"
