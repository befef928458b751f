#pragma once

#include "synthcal/calibration.hpp"
#include "synthcal/classifier.hpp"
#include "synthcal/common.hpp"
#include "synthcal/cvae.hpp"
#include "synthcal/data.hpp"
#include "synthcal/distance.hpp"
#include "synthcal/generators.hpp"
#include "synthcal/gmm.hpp"
#include "synthcal/hybridizer.hpp"
#include "synthcal/metrics.hpp"
#include "synthcal/nn.hpp"
#include "synthcal/pipeline.hpp"
