#pragma once

#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/spectral.hpp"
#include "hopfdbc/dispersion.hpp"
#include "hopfdbc/normalform.hpp"
#include "hopfdbc/bvp.hpp"
#include "hopfdbc/continuation.hpp"
#include "hopfdbc/stability.hpp"
#include "hopfdbc/fieldsim.hpp"
#include "hopfdbc/branch_io.hpp"
#include "hopfdbc/config.hpp"
#include "hopfdbc/svg.hpp"
#include "hopfdbc/sweep.hpp"
