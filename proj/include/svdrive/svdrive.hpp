#pragma once

#include "svdrive/analysis.hpp"
#include "svdrive/config.hpp"
#include "svdrive/errors.hpp"
#include "svdrive/inverter.hpp"
#include "svdrive/machine.hpp"
#include "svdrive/output.hpp"
#include "svdrive/simulation.hpp"
#include "svdrive/solver.hpp"
#include "svdrive/study.hpp"
#include "svdrive/svpwm.hpp"
