#pragma once

#include "desgraph/assign.hpp"
#include "desgraph/combinatorics.hpp"
#include "desgraph/design.hpp"
#include "desgraph/dsl.hpp"
#include "desgraph/error.hpp"
#include "desgraph/factors.hpp"
#include "desgraph/menu.hpp"
#include "desgraph/records.hpp"
#include "desgraph/rng.hpp"
#include "desgraph/serve.hpp"
#include "desgraph/simulate.hpp"
#include "desgraph/table.hpp"
#include "desgraph/types.hpp"
