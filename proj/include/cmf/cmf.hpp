#pragma once

#include "analysis.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "search.hpp"
#include "simulator.hpp"
