#pragma once

#include "smash/error.hpp"
#include "smash/genesess.hpp"
#include "smash/info.hpp"
#include "smash/io.hpp"
#include "smash/metric.hpp"
#include "smash/pfsa.hpp"
#include "smash/quantize.hpp"
