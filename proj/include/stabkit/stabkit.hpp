#pragma once

#include "binaryops.hpp"
#include "factorizer.hpp"
#include "gksim.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "patterns.hpp"
#include "xstab.hpp"
