#pragma once

#include "torpsido/core.hpp"
#include "torpsido/grid.hpp"
#include "torpsido/difference.hpp"
#include "torpsido/dyadic.hpp"
#include "torpsido/symbol.hpp"
#include "torpsido/zoo.hpp"
#include "torpsido/psido.hpp"
#include "torpsido/besov.hpp"
#include "torpsido/verify.hpp"
#include "torpsido/report.hpp"
