// polar_tls.hpp: everything in one include.

#pragma once

#include "polar_tls/numerics.hpp"
#include "polar_tls/model.hpp"
#include "polar_tls/overlaps.hpp"
#include "polar_tls/ladder.hpp"
#include "polar_tls/rates.hpp"
#include "polar_tls/random.hpp"
#include "polar_tls/cascade.hpp"
#include "polar_tls/sweep.hpp"
