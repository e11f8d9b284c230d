#pragma once

#include "dlfr/codec.hpp"
#include "dlfr/config.hpp"
#include "dlfr/cost_metrics.hpp"
#include "dlfr/errors.hpp"
#include "dlfr/flow.hpp"
#include "dlfr/interp.hpp"
#include "dlfr/pipeline.hpp"
#include "dlfr/rng.hpp"
#include "dlfr/rope.hpp"
#include "dlfr/schedule.hpp"
#include "dlfr/similarity.hpp"
#include "dlfr/synthetic.hpp"
#include "dlfr/tensor.hpp"
#include "dlfr/tensor_io.hpp"
