#pragma once

#include "evprice/baselines.hpp"
#include "evprice/demand_model.hpp"
#include "evprice/demo.hpp"
#include "evprice/error.hpp"
#include "evprice/grid.hpp"
#include "evprice/harness.hpp"
#include "evprice/ingest.hpp"
#include "evprice/json_io.hpp"
#include "evprice/matrix.hpp"
#include "evprice/mcdm.hpp"
#include "evprice/moo/nsga.hpp"
#include "evprice/moo/problem.hpp"
#include "evprice/moo/reference_points.hpp"
#include "evprice/moo/sorting.hpp"
#include "evprice/moo/variation.hpp"
#include "evprice/objectives.hpp"
#include "evprice/pricing.hpp"
#include "evprice/scenario.hpp"
