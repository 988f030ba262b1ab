#pragma once

#include "qspeed/error.hpp"
#include "qspeed/linalg.hpp"
#include "qspeed/speed.hpp"
#include "qspeed/sampling.hpp"
#include "qspeed/oracle.hpp"
#include "qspeed/optimal.hpp"
#include "qspeed/resources.hpp"
#include "qspeed/experiments.hpp"
