#include "pipeline/schedule.hpp"

#include "core/error.hpp"

namespace darktext::pipeline {

double lr_schedule(int epoch, const TrainSettings& settings) {
    require(epoch >= 0, ErrorCode::InvalidArgument, "epoch must be non-negative");
    if (settings.decay_epoch > 0 && epoch >= settings.decay_epoch) return settings.lr_decayed;
    return settings.lr;
}

} // namespace darktext::pipeline
