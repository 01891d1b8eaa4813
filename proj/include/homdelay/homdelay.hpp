#pragma once

#include "homdelay/comparison.hpp"
#include "homdelay/csv.hpp"
#include "homdelay/errors.hpp"
#include "homdelay/estimate.hpp"
#include "homdelay/history.hpp"
#include "homdelay/integrator.hpp"
#include "homdelay/json_io.hpp"
#include "homdelay/krasovskii.hpp"
#include "homdelay/model.hpp"
#include "homdelay/polynomial.hpp"
#include "homdelay/quadrature.hpp"
#include "homdelay/rational.hpp"
#include "homdelay/razumikhin.hpp"
#include "homdelay/registry.hpp"
#include "homdelay/roots.hpp"
#include "homdelay/sampling.hpp"
#include "homdelay/tables.hpp"
#include "homdelay/tuner.hpp"
