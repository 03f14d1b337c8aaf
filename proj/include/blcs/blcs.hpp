#pragma once

#include "blcs/bench.hpp"
#include "blcs/bit_string.hpp"
#include "blcs/covering.hpp"
#include "blcs/dp.hpp"
#include "blcs/error.hpp"
#include "blcs/lcs.hpp"
#include "blcs/oracle.hpp"
#include "blcs/params.hpp"
#include "blcs/reduction.hpp"
#include "blcs/structure.hpp"
