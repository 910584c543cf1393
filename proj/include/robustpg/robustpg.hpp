#pragma once

#include "robustpg/errors.hpp"
#include "robustpg/numerics.hpp"
#include "robustpg/regions.hpp"
#include "robustpg/params.hpp"
#include "robustpg/mechanisms.hpp"
#include "robustpg/nagent.hpp"
#include "robustpg/distributions.hpp"
#include "robustpg/simplex.hpp"
#include "robustpg/verify.hpp"
