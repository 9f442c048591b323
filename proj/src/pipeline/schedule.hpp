#pragma once

#include "pipeline/config.hpp"

namespace darktext::pipeline {

// Piecewise-constant: `lr` before `decay_epoch`, `lr_decayed` from it on.
// A decay epoch of 0 keeps the rate constant.
double lr_schedule(int epoch, const TrainSettings& settings);

} // namespace darktext::pipeline
