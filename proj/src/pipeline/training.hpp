#pragma once

#include "dataset/dataset.hpp"
#include "losses/losses.hpp"
#include "nn/adam.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/config.hpp"

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace darktext::pipeline {

struct LossRecord {
    long long step = 0;   // 1-based optimizer step
    int epoch = 0;        // 0-based epoch the step belongs to
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;
    double lr = 0.0;
};

std::string loss_csv_header(const LossRecord& record);
// Values printed with 17 significant digits so logs round-trip exactly.
std::string loss_csv_row(const LossRecord& record);

// A training batch: short (dark) and long (bright) patches of equal size.
struct Batch {
    std::vector<ImageTensor> short_patches;
    std::vector<ImageTensor> long_patches;
};

// Shared epoch loop: shuffles the pairs with the trainer's RNG, samples one
// patch per pair (Text-CP applied when enabled), steps Adam once per batch.
class Trainer {
public:
    Trainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs, TrainSettings settings);
    virtual ~Trainer() = default;

    using StepCallback = std::function<void(const LossRecord&)>;
    void run_epoch(const StepCallback& on_step = {});
    // One optimizer step on explicit patches, at the current epoch's rate.
    LossRecord train_step(const Batch& batch);

    int epoch() const { return epoch_; }
    long long step() const { return step_; }
    const RunConfig& config() const { return cfg_; }
    const TrainSettings& settings() const { return settings_; }

    Checkpoint checkpoint() const;
    void resume(const Checkpoint& ckpt);

    virtual std::string kind() const = 0;
    virtual nn::ParameterStore& parameters() = 0;
    virtual const nn::ParameterStore& parameters() const = 0;

protected:
    // Forward pass and loss terms; returns the total and fills `record`.
    virtual nn::Var compute_loss(const Batch& batch, LossRecord& record) = 0;

    RunConfig cfg_;
    TrainSettings settings_;

private:
    Batch sample_batch(const std::vector<std::size_t>& indices);

    std::vector<data::SamplePair> pairs_;
    std::mt19937_64 rng_;
    nn::Adam adam_;
    int epoch_ = 0;
    long long step_ = 0;
    bool textcp_ready_ = false;
    textcp::TextPool pool_;
    data::BoxStats stats_;
};

class EnhancerTrainer final : public Trainer {
public:
    EnhancerTrainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs);

    std::string kind() const override { return "enhancer"; }
    nn::ParameterStore& parameters() override { return net_.parameters(); }
    const nn::ParameterStore& parameters() const override { return net_.parameters(); }
    enhancer::EnhancerNetwork& network() { return net_; }

protected:
    nn::Var compute_loss(const Batch& batch, LossRecord& record) override;

private:
    enhancer::EnhancerNetwork net_;
    losses::SurrogateTextScorer scorer_;
};

// Learns to map long exposures (input) onto their short exposures (target).
class SynthTrainer final : public Trainer {
public:
    SynthTrainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs);

    std::string kind() const override { return "synth"; }
    nn::ParameterStore& parameters() override { return net_.parameters(); }
    const nn::ParameterStore& parameters() const override { return net_.parameters(); }
    synth::CurveNetwork& network() { return net_; }

protected:
    nn::Var compute_loss(const Batch& batch, LossRecord& record) override;

private:
    synth::CurveNetwork net_;
};

// Rebuild inference models from checkpoints.
std::unique_ptr<enhancer::EnhancerNetwork> load_enhancer(const Checkpoint& ckpt);
std::unique_ptr<synth::CurveNetwork> load_synth(const Checkpoint& ckpt);

} // namespace darktext::pipeline
