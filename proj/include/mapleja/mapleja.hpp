#pragma once

#include "mapleja/adaptive.hpp"
#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/gpc.hpp"
#include "mapleja/leja.hpp"
#include "mapleja/linear_model.hpp"
#include "mapleja/maps.hpp"
#include "mapleja/material.hpp"
#include "mapleja/multi_index.hpp"
#include "mapleja/serialization.hpp"
#include "mapleja/stats.hpp"
#include "mapleja/surrogate.hpp"
