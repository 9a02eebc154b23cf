#pragma once

#include "lhsphere/core.hpp"
#include "lhsphere/decay.hpp"
#include "lhsphere/errors.hpp"
#include "lhsphere/mie.hpp"
#include "lhsphere/rays.hpp"
#include "lhsphere/resonance.hpp"
#include "lhsphere/specfun.hpp"
