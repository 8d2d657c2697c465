#pragma once

#include "mrfseg/bitplane.hpp"
#include "mrfseg/ensemble.hpp"
#include "mrfseg/error.hpp"
#include "mrfseg/grid.hpp"
#include "mrfseg/harness.hpp"
#include "mrfseg/imageio.hpp"
#include "mrfseg/metrics.hpp"
#include "mrfseg/mrf.hpp"
