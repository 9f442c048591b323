#include "pipeline/training.hpp"

#include "core/canny.hpp"
#include "core/edges.hpp"
#include "core/error.hpp"
#include "nn/ops.hpp"
#include "pipeline/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace darktext::pipeline {

namespace {

constexpr std::uint64_t kLoopStream = 0x9e3779b97f4a7c15ULL;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nn::Tensor edge_batch(const std::vector<EdgeMap>& maps) {
    return map_to_tensor<EdgeTag>(std::span<const EdgeMap>(maps));
}

} // namespace

std::string loss_csv_header(const LossRecord& record) {
    std::string out = "step,epoch";
    for (const auto& [name, _] : record.terms) out += "," + name;
    return out + ",total,lr";
}

std::string loss_csv_row(const LossRecord& record) {
    std::string out = std::to_string(record.step) + "," + std::to_string(record.epoch);
    for (const auto& [_, v] : record.terms) out += "," + format_double(v);
    return out + "," + format_double(record.total) + "," + format_double(record.lr);
}

Trainer::Trainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs, TrainSettings settings)
    : cfg_(cfg), settings_(std::move(settings)), pairs_(std::move(pairs)), rng_(cfg_.seed ^ kLoopStream) {
    require(!pairs_.empty(), ErrorCode::EmptyCorpus, "training needs at least one image pair");
}

Batch Trainer::sample_batch(const std::vector<std::size_t>& indices) {
    if (cfg_.textcp_enabled && !textcp_ready_) {
        pool_ = textcp::build_pool(pairs_);
        require(!pool_.empty(), ErrorCode::Config, "Text-CP is enabled but the corpus has no legible text boxes");
        stats_ = data::compute_box_stats(pairs_);
        textcp_ready_ = true;
    }
    Batch batch;
    for (std::size_t i : indices) {
        const auto& pair = pairs_[i];
        data::PatchSample patch;
        try {
            patch = data::sample_patch(pair, settings_.patch, rng_());
        } catch (const Error& e) {
            fail(e.code(), "sample '" + pair.id + "': " + e.what());
        }
        if (cfg_.textcp_enabled) {
            textcp::TextCpParams params = cfg_.textcp;
            params.stats = stats_;
            params.rng_seed = rng_();
            textcp::AugmentInputs inputs;
            inputs.paired_short = &patch.short_patch;
            inputs.image_id = pair.id;
            auto aug = textcp::text_cp_augment(patch.long_patch, patch.boxes, pool_, params, inputs);
            patch.long_patch = std::move(aug.image);
            patch.short_patch = std::move(aug.short_image);
        }
        batch.short_patches.push_back(std::move(patch.short_patch));
        batch.long_patches.push_back(std::move(patch.long_patch));
    }
    return batch;
}

void Trainer::run_epoch(const StepCallback& on_step) {
    std::vector<std::size_t> order(pairs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);
    for (std::size_t start = 0; start < order.size(); start += settings_.batch_size) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(settings_.batch_size));
        const Batch batch = sample_batch({order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end)});
        const LossRecord record = train_step(batch);
        if (on_step) on_step(record);
    }
    ++epoch_;
}

LossRecord Trainer::train_step(const Batch& batch) {
    require(!batch.short_patches.empty() && batch.short_patches.size() == batch.long_patches.size(), ErrorCode::Shape,
            "batch needs matching, non-empty short and long patches");
    LossRecord record;
    record.epoch = epoch_;
    record.lr = lr_schedule(epoch_, settings_);
    const nn::Var total = compute_loss(batch, record);
    losses::check_finite(total, "total");
    record.total = total.item();

    nn::ParameterStore& params = parameters();
    params.zero_grad();
    nn::backward(total);
    adam_.step(params, record.lr);
    record.step = ++step_;
    // a finite loss can still push weights to inf / NaN; stop before that state is checkpointed
    for (const auto& [name, p] : params.entries()) {
        for (double v : p.value().values()) {
            if (!std::isfinite(v)) {
                fail(ErrorCode::Numeric, "parameter '" + name + "' is not finite after step " + std::to_string(step_));
            }
        }
    }
    return record;
}

Checkpoint Trainer::checkpoint() const {
    Checkpoint ckpt;
    ckpt.kind = kind();
    ckpt.config = config_to_json(cfg_);
    ckpt.epoch = epoch_;
    ckpt.step = step_;
    std::ostringstream rng_text;
    rng_text << rng_;
    ckpt.rng_state = rng_text.str();
    capture_state(ckpt, parameters(), adam_);
    return ckpt;
}

void Trainer::resume(const Checkpoint& ckpt) {
    require(ckpt.kind == kind(), ErrorCode::Data,
            "cannot resume " + kind() + " training from a '" + ckpt.kind + "' checkpoint");
    restore_state(ckpt, parameters(), adam_);
    std::istringstream rng_text(ckpt.rng_state);
    rng_text >> rng_;
    require(!rng_text.fail(), ErrorCode::Data, "checkpoint RNG state is corrupt");
    epoch_ = static_cast<int>(ckpt.epoch);
    step_ = ckpt.step;
}

EnhancerTrainer::EnhancerTrainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs)
    : Trainer(cfg, std::move(pairs), cfg.train_enhance),
      net_(cfg_.enhancer, cfg_.seed),
      scorer_(cfg_.enhancer_loss.text_gain) {}

nn::Var EnhancerTrainer::compute_loss(const Batch& batch, LossRecord& record) {
    const auto& lc = cfg_.enhancer_loss;
    std::vector<EdgeMap> inputs;
    std::vector<EdgeMap> targets;
    for (std::size_t i = 0; i < batch.short_patches.size(); ++i) {
        inputs.push_back(sobel_edges(batch.short_patches[i]));
        targets.push_back(canny_edges(batch.long_patches[i], lc.canny));
    }
    const nn::Var x = nn::Var::constant(to_tensor(batch.short_patches));
    const nn::Var y = nn::Var::constant(to_tensor(batch.long_patches));
    const nn::Var e = nn::Var::constant(edge_batch(inputs));
    const nn::Tensor gt = edge_batch(targets);

    const enhancer::EnhancerVars out = net_.forward(x, e);
    losses::EnhancementLossTerms terms;
    terms.recons = losses::smooth_l1(out.enhanced, y, lc.smooth_l1_delta);
    terms.text = losses::text_detection_loss(scorer_, out.enhanced, y);
    terms.ssim_ms = losses::ms_ssim_loss(out.enhanced, y, lc.ms_ssim);
    terms.edge = losses::edge_reconstruction_loss(out.side_edges, out.fused_edge, gt, lc.edge);
    record.terms = {{"recons", terms.recons.item()},
                    {"text", terms.text.item()},
                    {"ssim_ms", terms.ssim_ms.item()},
                    {"edge", terms.edge.item()}};
    return losses::total_enhancement_loss(terms, lc.weights);
}

SynthTrainer::SynthTrainer(const RunConfig& cfg, std::vector<data::SamplePair> pairs)
    : Trainer(cfg, std::move(pairs), cfg.train_synth), net_(cfg_.synth, cfg_.seed) {}

nn::Var SynthTrainer::compute_loss(const Batch& batch, LossRecord& record) {
    const auto& lc = cfg_.synth_loss;
    const nn::Var y = nn::Var::constant(to_tensor(batch.long_patches));
    const nn::Var target = nn::Var::constant(to_tensor(batch.short_patches));
    const synth::CurveParams curve = net_.forward(y);
    const nn::Var x_hat = synth::apply_curve(y, curve, false);
    synth::SynthLossTerms terms;
    terms.prox = synth::proximity_loss(x_hat, target);
    terms.spa = synth::spatial_consistency_loss(x_hat, y, lc.spa);
    terms.tv_h = synth::tv_loss(curve.h);
    terms.tv_u = synth::tv_loss(curve.u);
    record.terms = {{"prox", terms.prox.item()},
                    {"spa", terms.spa.item()},
                    {"tv_h", terms.tv_h.item()},
                    {"tv_u", terms.tv_u.item()}};
    return synth::total_synthesis_loss(terms, lc.weights);
}

std::unique_ptr<enhancer::EnhancerNetwork> load_enhancer(const Checkpoint& ckpt) {
    require(ckpt.kind == "enhancer", ErrorCode::Data, "expected an enhancer checkpoint, got '" + ckpt.kind + "'");
    const RunConfig cfg = config_from_json(ckpt.config);
    auto net = std::make_unique<enhancer::EnhancerNetwork>(cfg.enhancer, cfg.seed);
    restore_parameters(ckpt, net->parameters());
    return net;
}

std::unique_ptr<synth::CurveNetwork> load_synth(const Checkpoint& ckpt) {
    require(ckpt.kind == "synth", ErrorCode::Data, "expected a synth checkpoint, got '" + ckpt.kind + "'");
    const RunConfig cfg = config_from_json(ckpt.config);
    auto net = std::make_unique<synth::CurveNetwork>(cfg.synth, cfg.seed);
    restore_parameters(ckpt, net->parameters());
    return net;
}

} // namespace darktext::pipeline
