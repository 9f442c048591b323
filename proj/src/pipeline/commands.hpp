#pragma once

#include "core/error.hpp"
#include "pipeline/config.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace darktext::pipeline {

enum class Task { TrainEnhance, TrainSynth, Enhance, Synthesize, Augment, Evaluate };

Task parse_task(std::string_view name);
std::string_view task_name(Task task);

struct TaskSummary {
    std::vector<fs::path> outputs;   // principal files written
    std::string message;
};

// Runs one CLI task; everything is written beneath cfg.output_dir.
//   train-enhance / train-synth: loss_<kind>.csv, checkpoints/, <kind>.ckpt
//   enhance:     enhanced/<rel>.png (+ edges/, panels/)
//   synthesize:  synthesized/<rel>.png and <rel>.png.provenance.json
//   augment:     augmented/ images, ICDAR files and manifest.csv
//   evaluate:    report.txt and report.json
TaskSummary run_task(const RunConfig& cfg, Task task);

// Process exit status: 2 configuration, 3 data, 4 numeric, 1 anything else.
int exit_code(ErrorCode code);

} // namespace darktext::pipeline
