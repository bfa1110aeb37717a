#pragma once

#include "troploc/core.hpp"
#include "troploc/gauges.hpp"
#include "troploc/io.hpp"
#include "troploc/lp.hpp"
#include "troploc/solve.hpp"
#include "troploc/sets.hpp"
#include "troploc/phylo.hpp"
#include "troploc/config.hpp"
#include "troploc/plot.hpp"
