#pragma once

#include "umstnet/error.hpp"
#include "umstnet/rng.hpp"
#include "umstnet/union_find.hpp"
#include "umstnet/graph.hpp"
#include "umstnet/umst.hpp"
#include "umstnet/city.hpp"
#include "umstnet/workload.hpp"
#include "umstnet/sim.hpp"
#include "umstnet/validate.hpp"
#include "umstnet/metrics.hpp"
#include "umstnet/io.hpp"
#include "umstnet/sweep.hpp"
