#include "pipeline/commands.hpp"

#include "core/image_io.hpp"
#include "dataset/icdar.hpp"
#include "dataset/manifest.hpp"
#include "metrics/detection.hpp"
#include "metrics/image_metrics.hpp"
#include "core/color.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/inference.hpp"
#include "pipeline/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace darktext::pipeline {

namespace {

constexpr std::pair<Task, std::string_view> kTaskNames[] = {
    {Task::TrainEnhance, "train-enhance"}, {Task::TrainSynth, "train-synth"}, {Task::Enhance, "enhance"},
    {Task::Synthesize, "synthesize"},      {Task::Augment, "augment"},        {Task::Evaluate, "evaluate"},
};

struct InputImage {
    fs::path path;
    fs::path relative;
};

// Image files under `root`, sorted by relative path for deterministic order.
std::vector<InputImage> list_images(const fs::path& root, const char* what) {
    require(!root.empty(), ErrorCode::Config, std::string(what) + " is not set");
    require(fs::is_directory(root), ErrorCode::Io, std::string(what) + " " + root.string() + " is not a directory");
    std::vector<InputImage> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            out.push_back({entry.path(), fs::relative(entry.path(), root)});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.relative < b.relative; });
    require(!out.empty(), ErrorCode::EmptyCorpus, "no images found under " + root.string());
    return out;
}

fs::path with_png(fs::path rel) { return rel.replace_extension(".png"); }

std::string id_of(const fs::path& rel) { return fs::path(rel).replace_extension().generic_string(); }

std::vector<data::SamplePair> load_training_pairs(const RunConfig& cfg) {
    require(!cfg.data.manifest.empty(), ErrorCode::Config, "data.manifest is not set");
    data::LoadOptions options;
    options.allow_unlabeled = cfg.data.allow_unlabeled;
    return data::load_split(data::read_manifest(cfg.data.manifest), cfg.data.train_split, options);
}

TaskSummary train(const RunConfig& cfg, Task task) {
    const fs::path out = cfg.output_dir;
    fs::create_directories(out / "checkpoints");
    auto pairs = load_training_pairs(cfg);
    std::unique_ptr<Trainer> trainer;
    if (task == Task::TrainEnhance) trainer = std::make_unique<EnhancerTrainer>(cfg, std::move(pairs));
    else trainer = std::make_unique<SynthTrainer>(cfg, std::move(pairs));
    const TrainSettings& settings = trainer->settings();

    const fs::path log_path = out / ("loss_" + trainer->kind() + ".csv");
    const bool resuming = !settings.resume.empty();
    if (resuming) trainer->resume(load_checkpoint(settings.resume));
    std::ofstream log(log_path, resuming ? std::ios::app : std::ios::trunc);
    require(static_cast<bool>(log), ErrorCode::Io, "cannot write " + log_path.string());
    bool header_written = resuming && fs::file_size(log_path) > 0;

    const fs::path final_path = out / (trainer->kind() + ".ckpt");
    while (trainer->epoch() < settings.epochs) {
        trainer->run_epoch([&](const LossRecord& r) {
            if (!header_written) {
                log << loss_csv_header(r) << '\n';
                header_written = true;
            }
            log << loss_csv_row(r) << '\n';
            log.flush();
        });
        const int e = trainer->epoch();
        if (e % settings.checkpoint_every == 0 || e == settings.epochs) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_epoch_%06d.ckpt", trainer->kind().c_str(), e);
            const Checkpoint ckpt = trainer->checkpoint();
            save_checkpoint(out / "checkpoints" / name, ckpt);
            save_checkpoint(final_path, ckpt);
        }
    }
    return {{final_path, log_path},
            "trained " + trainer->kind() + " for " + std::to_string(trainer->epoch()) + " epochs (" +
                std::to_string(trainer->step()) + " steps)"};
}

ImageTensor gray_to_rgb(const ImageTensor& g) {
    ImageTensor out(g.height(), g.width(), 3);
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = g.at(y, x);
    return out;
}

ImageTensor side_by_side(const std::vector<ImageTensor>& parts) {
    int w = 0;
    for (const auto& p : parts) w += p.width();
    ImageTensor out(parts.front().height(), w, 3);
    int x0 = 0;
    for (const auto& p : parts) {
        const ImageTensor rgb = p.channels() == 3 ? p : gray_to_rgb(p);
        for (int y = 0; y < rgb.height(); ++y)
            for (int x = 0; x < rgb.width(); ++x)
                for (int c = 0; c < 3; ++c) out.at(y, x0 + x, c) = rgb.at(y, x, c);
        x0 += p.width();
    }
    return out;
}

TileSpec tile_spec(const EnhanceSettings& e) { return {e.tile, e.tile_size, e.tile_overlap}; }

TaskSummary enhance(const RunConfig& cfg) {
    const auto& s = cfg.enhance;
    require(!s.checkpoint.empty(), ErrorCode::Config, "enhance.checkpoint is not set");
    const auto net = load_enhancer(load_checkpoint(s.checkpoint));
    const auto inputs = list_images(s.input_dir, "enhance.input_dir");
    TaskSummary summary;
    for (const auto& in : inputs) {
        const ImageTensor x = read_image(in.path);
        const fs::path edge_path = s.edge_source == enhancer::EdgeSource::File ? s.edge_dir / with_png(in.relative) : fs::path{};
        const EdgeMap edges = enhancer::input_edges(x, s.edge_source, edge_path);
        const EnhanceResult r = enhance_image(*net, x, edges, tile_spec(s));
        const fs::path out = cfg.output_dir / "enhanced" / with_png(in.relative);
        write_image(out, r.enhanced);
        summary.outputs.push_back(out);
        if (s.write_edges) write_map(cfg.output_dir / "edges" / with_png(in.relative), r.fused_edge);
        if (s.panels) {
            write_image(cfg.output_dir / "panels" / with_png(in.relative),
                        side_by_side({x, r.enhanced, as_image(r.fused_edge)}));
        }
    }
    summary.message = "enhanced " + std::to_string(inputs.size()) + " image(s)";
    return summary;
}

TaskSummary synthesize(const RunConfig& cfg) {
    const auto& s = cfg.synthesize;
    require(!s.checkpoint.empty(), ErrorCode::Config, "synthesize.checkpoint is not set");
    const auto net = load_synth(load_checkpoint(s.checkpoint));
    const std::string model_hash = file_sha256(s.checkpoint);
    const auto inputs = list_images(s.input_dir, "synthesize.input_dir");
    TaskSummary summary;
    for (const auto& in : inputs) {
        const ImageTensor y = read_image(in.path);
        const ImageTensor x_hat = synthesize_image(*net, y, s.clamp, tile_spec(cfg.enhance));
        const fs::path out = cfg.output_dir / "synthesized" / with_png(in.relative);
        write_image(out, x_hat);
        const nlohmann::json provenance = {{"source", in.path.generic_string()},
                                           {"model_sha256", model_hash},
                                           {"clamp", s.clamp}};
        std::ofstream side(out.string() + ".provenance.json");
        require(static_cast<bool>(side), ErrorCode::Io, "cannot write provenance for " + out.string());
        side << provenance.dump(2) << '\n';
        summary.outputs.push_back(out);
    }
    summary.message = "synthesized " + std::to_string(inputs.size()) + " image(s)";
    return summary;
}

TaskSummary augment(const RunConfig& cfg) {
    const auto pairs = load_training_pairs(cfg);
    const textcp::TextPool pool = textcp::build_pool(pairs);
    require(!pool.empty(), ErrorCode::Config, "the corpus has no legible text boxes to paste");
    const data::BoxStats stats = data::compute_box_stats(pairs);
    std::mt19937_64 rng(cfg.seed);
    const fs::path dir = cfg.output_dir / "augmented";
    fs::create_directories(dir);
    std::vector<data::ManifestEntry> entries;
    TaskSummary summary;
    int pasted = 0;
    for (const auto& pair : pairs) {
        for (int k = 0; k < cfg.augment.copies; ++k) {
            textcp::TextCpParams params = cfg.textcp;
            params.stats = stats;
            params.rng_seed = rng();
            textcp::AugmentInputs inputs;
            inputs.paired_short = &pair.short_exposure;
            inputs.image_id = pair.id;
            const auto r = textcp::text_cp_augment(pair.long_exposure, pair.boxes, pool, params, inputs);
            pasted += r.pasted;
            const std::string id = pair.id + "_cp" + std::to_string(k);
            data::ManifestEntry e{dir / (id + "_short.png"), dir / (id + "_long.png"), dir / (id + ".txt"), "train", id};
            write_image(e.short_path, r.short_image);
            write_image(e.long_path, r.image);
            data::write_icdar_file(e.annotation_path, r.boxes);
            entries.push_back(e);
            summary.outputs.push_back(e.long_path);
        }
    }
    data::write_manifest(dir / "manifest.csv", entries);
    summary.outputs.push_back(dir / "manifest.csv");
    summary.message = "wrote " + std::to_string(entries.size()) + " augmented pair(s), " + std::to_string(pasted) +
                      " pasted text instance(s)";
    return summary;
}

nlohmann::json psnr_json(const metrics::Psnr& p) {
    return p.infinite ? nlohmann::json(nullptr) : nlohmann::json(p.db);
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string psnr_text(const metrics::Psnr& p) { return p.infinite ? "inf" : fixed(p.db, 3); }

TaskSummary evaluate(const RunConfig& cfg) {
    const auto& s = cfg.evaluate;
    const auto refs = list_images(s.reference_dir, "evaluate.reference_dir");
    const auto outs = list_images(s.enhanced_dir, "evaluate.enhanced_dir");
    std::map<std::string, fs::path> ref_by_id;
    std::map<std::string, fs::path> out_by_id;
    for (const auto& r : refs) ref_by_id[id_of(r.relative)] = r.path;
    for (const auto& o : outs) out_by_id[id_of(o.relative)] = o.path;
    std::vector<std::string> unmatched;
    for (const auto& [id, _] : ref_by_id)
        if (!out_by_id.count(id)) unmatched.push_back("missing enhanced image for '" + id + "'");
    for (const auto& [id, _] : out_by_id)
        if (!ref_by_id.count(id)) unmatched.push_back("no reference for enhanced image '" + id + "'");
    if (!unmatched.empty()) {
        std::string msg = "enhanced and reference trees differ:";
        for (const auto& u : unmatched) msg += "\n  " + u;
        fail(ErrorCode::Data, msg);
    }

    const bool with_detection = !s.detection_dir.empty();
    const bool with_recognition = !s.recognition_dir.empty();
    require(!(with_detection || with_recognition) || !s.annotation_dir.empty(), ErrorCode::Config,
            "evaluate.annotation_dir is required for detection or recognition scoring");

    nlohmann::json images = nlohmann::json::array();
    double ssim_sum = 0.0, psnr_sum = 0.0, lightness_sum = 0.0;
    bool any_infinite = false;
    metrics::DetectionTally tally;
    int words_correct = 0, words_total = 0;
    std::string table = "id  PSNR  SSIM  L*\n";
    for (const auto& [id, ref_path] : ref_by_id) {
        const ImageTensor ref = read_image(ref_path);
        const ImageTensor out = read_image(out_by_id.at(id));
        const metrics::Psnr p = metrics::psnr(out, ref);
        const double ss = metrics::ssim(out, ref);
        const double lightness = mean_lightness(out);
        any_infinite = any_infinite || p.infinite;
        if (!p.infinite) psnr_sum += p.db;
        ssim_sum += ss;
        lightness_sum += lightness;
        nlohmann::json row = {{"id", id}, {"psnr", psnr_json(p)}, {"psnr_infinite", p.infinite},
                              {"ssim", ss}, {"avg_lightness", lightness}};

        if (with_detection || with_recognition) {
            const auto gts = data::read_icdar_file(s.annotation_dir / (id + ".txt"));
            if (with_detection) {
                const fs::path det = s.detection_dir / (id + ".txt");
                const auto preds = fs::exists(det) ? data::read_icdar_file(det) : std::vector<TextBox>{};
                const auto m = metrics::match_detections(preds, gts);
                tally.add(m, gts);
                row["detection"] = {{"tp", m.tp}, {"fp", m.fp}, {"excluded", m.excluded}};
            }
            if (with_recognition) {
                const fs::path rec = s.recognition_dir / (id + ".txt");
                const auto preds = fs::exists(rec) ? data::read_icdar_file(rec) : std::vector<TextBox>{};
                const int legible = static_cast<int>(
                    std::count_if(gts.begin(), gts.end(), [](const TextBox& b) { return b.legible(); }));
                const auto records = metrics::pair_recognitions(preds, gts);
                const double acc = metrics::word_accuracy(records, legible);
                words_correct += metrics::count_correct_words(records);
                words_total += legible;
                row["word_accuracy"] = legible > 0 ? nlohmann::json(acc) : nlohmann::json(nullptr);
            }
        }
        images.push_back(row);
        table += id + "  " + psnr_text(p) + "  " + fixed(ss) + "  " + fixed(lightness) + "\n";
    }

    const double n = static_cast<double>(ref_by_id.size());
    const metrics::Psnr mean_psnr{any_infinite ? INFINITY : psnr_sum / n, any_infinite};
    nlohmann::json aggregate = {{"count", ref_by_id.size()},
                                {"psnr", psnr_json(mean_psnr)},
                                {"psnr_infinite", any_infinite},
                                {"ssim", ssim_sum / n},
                                {"avg_lightness", lightness_sum / n},
                                {"lpips", nullptr},
                                {"detection", nullptr},
                                {"word_accuracy", nullptr}};
    std::string det_text = "absent", word_text = "absent";
    if (with_detection) {
        const auto sc = tally.scores();
        aggregate["detection"] = {{"precision", sc.precision}, {"recall", sc.recall}, {"hmean", sc.hmean},
                                  {"tp", tally.tp},           {"fp", tally.fp},         {"legible_gt", tally.legible_gt}};
        det_text = fixed(sc.hmean);
    }
    if (with_recognition) {
        const double acc = words_total > 0 ? static_cast<double>(words_correct) / words_total : 1.0;
        aggregate["word_accuracy"] = {{"accuracy", acc}, {"correct", words_correct}, {"legible_gt", words_total}};
        word_text = fixed(acc);
    }

    const nlohmann::json report = {{"images", images}, {"aggregate", aggregate}};
    fs::create_directories(cfg.output_dir);
    const fs::path json_path = cfg.output_dir / "report.json";
    const fs::path text_path = cfg.output_dir / "report.txt";
    std::ofstream(json_path) << report.dump(2) << '\n';
    std::ofstream text(text_path);
    text << "PSNR  SSIM  LPIPS  H-Mean  WordAcc  AvgL*\n"
         << psnr_text(mean_psnr) << "  " << fixed(ssim_sum / n) << "  n/a  " << det_text << "  " << word_text << "  "
         << fixed(lightness_sum / n) << "\n\n"
         << table;
    require(static_cast<bool>(text), ErrorCode::Io, "cannot write " + text_path.string());
    return {{text_path, json_path}, "evaluated " + std::to_string(ref_by_id.size()) + " image(s)"};
}

} // namespace

Task parse_task(std::string_view name) {
    for (const auto& [task, n] : kTaskNames) {
        if (n == name) return task;
    }
    fail(ErrorCode::Config, "unknown task '" + std::string(name) +
                                "' (expected train-enhance, train-synth, enhance, synthesize, augment or evaluate)");
}

std::string_view task_name(Task task) {
    for (const auto& [t, n] : kTaskNames) {
        if (t == task) return n;
    }
    return "unknown";
}

TaskSummary run_task(const RunConfig& cfg, Task task) {
    switch (task) {
    case Task::TrainEnhance:
    case Task::TrainSynth: return train(cfg, task);
    case Task::Enhance: return enhance(cfg);
    case Task::Synthesize: return synthesize(cfg);
    case Task::Augment: return augment(cfg);
    case Task::Evaluate: return evaluate(cfg);
    }
    fail(ErrorCode::InvalidArgument, "unhandled task");
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument: return 2;
    case ErrorCode::Data:
    case ErrorCode::Io:
    case ErrorCode::Parse:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::SamplingExhausted:
    case ErrorCode::Shape:
    case ErrorCode::ProviderContract: return 3;
    case ErrorCode::Numeric: return 4;
    }
    return 1;
}

} // namespace darktext::pipeline
