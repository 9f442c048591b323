#include "pipeline/config.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace darktext::pipeline {

namespace {

// Reads keys out of one JSON object and reports any it did not consume.
class Reader {
public:
    Reader(const json* obj, std::string where, fs::path base) : obj_(obj), where_(std::move(where)), base_(std::move(base)) {
        if (obj_ && !obj_->is_object()) fail(ErrorCode::Config, "'" + where_ + "' must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        const json* v = find(key);
        if (!v) return;
        try {
            out = v->get<T>();
        } catch (const json::exception&) {
            fail(ErrorCode::Config, "'" + qualified(key) + "' has the wrong type");
        }
    }

    void path(const char* key, fs::path& out) {
        std::string s;
        get(key, s);
        if (s.empty()) return;
        fs::path p(s);
        out = p.is_relative() && !base_.empty() ? base_ / p : p;
    }

    Reader section(const char* key) {
        return Reader(find(key), qualified(key), base_);
    }

    void finish() const {
        if (!obj_) return;
        for (const auto& [k, _] : obj_->items()) {
            if (!used_.count(k)) fail(ErrorCode::Config, "unknown config key '" + qualified(k.c_str()) + "'");
        }
    }

private:
    const json* find(const char* key) {
        if (!obj_) return nullptr;
        auto it = obj_->find(key);
        if (it == obj_->end()) return nullptr;
        used_.insert(key);
        return &*it;
    }
    std::string qualified(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

    const json* obj_;
    std::string where_;
    fs::path base_;
    std::set<std::string> used_;
};

void read_patch(Reader& r, data::PatchSpec& p) {
    r.get("patch_size", p.size);
    r.get("require_legible_text", p.require_legible_text);
    r.get("random_flip", p.random_flip);
    r.get("random_transpose", p.random_transpose);
    r.get("keep_fraction", p.keep_fraction);
    r.get("dropped_to_dont_care", p.dropped_to_dont_care);
    r.get("max_draws", p.max_draws);
}

void read_train(Reader r, TrainSettings& t) {
    r.get("epochs", t.epochs);
    r.get("batch_size", t.batch_size);
    r.get("lr", t.lr);
    r.get("lr_decayed", t.lr_decayed);
    r.get("decay_epoch", t.decay_epoch);
    r.get("checkpoint_every", t.checkpoint_every);
    read_patch(r, t.patch);
    r.path("resume", t.resume);
    r.finish();
}

json train_to_json(const TrainSettings& t) {
    return {{"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"lr", t.lr},
            {"lr_decayed", t.lr_decayed},
            {"decay_epoch", t.decay_epoch},
            {"checkpoint_every", t.checkpoint_every},
            {"patch_size", t.patch.size},
            {"require_legible_text", t.patch.require_legible_text},
            {"random_flip", t.patch.random_flip},
            {"random_transpose", t.patch.random_transpose},
            {"keep_fraction", t.patch.keep_fraction},
            {"dropped_to_dont_care", t.patch.dropped_to_dont_care},
            {"max_draws", t.patch.max_draws},
            {"resume", t.resume.string()}};
}

void validate_train(const TrainSettings& t, const char* name) {
    const std::string n(name);
    require(t.epochs >= 1, ErrorCode::Config, n + ".epochs must be at least 1");
    require(t.batch_size >= 1, ErrorCode::Config, n + ".batch_size must be at least 1");
    require(t.lr > 0.0 && t.lr_decayed > 0.0, ErrorCode::Config, n + " learning rates must be positive");
    require(t.decay_epoch >= 0, ErrorCode::Config, n + ".decay_epoch must be non-negative");
    require(t.checkpoint_every >= 1, ErrorCode::Config, n + ".checkpoint_every must be at least 1");
    require(t.patch.size >= 1, ErrorCode::Config, n + ".patch_size must be positive");
}

std::string edge_source_name(enhancer::EdgeSource s) {
    return s == enhancer::EdgeSource::Classical ? "classical" : "file";
}

} // namespace

RunConfig profile_defaults(const std::string& profile) {
    RunConfig c;
    c.profile = profile;
    c.train_synth.decay_epoch = 0;
    if (profile == "desk") {
        c.enhancer.levels = 2;
        c.enhancer.base_channels = 16;
        c.synth.width = 16;
        c.enhancer_loss.ms_ssim.scales = 3;
        c.train_enhance = {300, 1, 1e-3, 1e-4, 2000, 50, {}, {}};
        c.train_enhance.patch.size = 64;
        c.train_synth = {300, 1, 1e-3, 1e-3, 0, 50, {}, {}};
        c.train_synth.patch.size = 64;
        c.train_synth.patch.require_legible_text = false;
        c.textcp_enabled = false;
    } else if (profile == "full") {
        c.enhancer.levels = 5;
        c.enhancer.base_channels = 32;
        c.synth.width = 32;
        c.enhancer_loss.ms_ssim.scales = 5;
        c.train_enhance = {4000, 2, 1e-4, 1e-5, 2000, 100, {}, {}};
        c.train_enhance.patch.size = 512;
        c.train_synth = {200, 8, 1e-4, 1e-4, 0, 100, {}, {}};
        c.train_synth.patch.size = 256;
        c.train_synth.patch.require_legible_text = false;
        c.textcp_enabled = true;
    } else {
        fail(ErrorCode::Config, "unknown profile '" + profile + "' (expected 'desk' or 'full')");
    }
    return c;
}

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
    require(doc.is_object(), ErrorCode::Config, "config document must be an object");
    Reader root(&doc, "", base_dir);
    std::string profile = "desk";
    root.get("profile", profile);
    RunConfig c = profile_defaults(profile);
    root.get("seed", c.seed);
    root.path("output_dir", c.output_dir);

    {
        Reader r = root.section("data");
        r.path("manifest", c.data.manifest);
        r.get("train_split", c.data.train_split);
        r.get("test_split", c.data.test_split);
        r.get("allow_unlabeled", c.data.allow_unlabeled);
        r.finish();
    }
    {
        Reader r = root.section("enhancer");
        r.get("levels", c.enhancer.levels);
        r.get("base_channels", c.enhancer.base_channels);
        r.get("max_channels", c.enhancer.max_channels);
        r.get("side_outputs", c.enhancer.side_outputs);
        r.get("attention_levels", c.enhancer.attention_levels);
        r.get("side_taps", c.enhancer.side_taps);
        r.finish();
    }
    {
        Reader r = root.section("synth");
        r.get("width", c.synth.width);
        r.finish();
    }
    {
        Reader r = root.section("enhancer_loss");
        auto& l = c.enhancer_loss;
        Reader w = r.section("weights");
        w.get("recons", l.weights.recons);
        w.get("text", l.weights.text);
        w.get("ssim_ms", l.weights.ssim_ms);
        w.get("edge", l.weights.edge);
        w.finish();
        r.get("smooth_l1_delta", l.smooth_l1_delta);
        r.get("edge_lambda", l.edge.lambda);
        r.get("text_gain", l.text_gain);
        Reader m = r.section("ms_ssim");
        m.get("scales", l.ms_ssim.scales);
        m.get("weights", l.ms_ssim.weights);
        m.get("window", l.ms_ssim.window);
        m.get("sigma", l.ms_ssim.sigma);
        m.get("c1", l.ms_ssim.c1);
        m.get("c2", l.ms_ssim.c2);
        m.finish();
        Reader k = r.section("canny");
        k.get("low_threshold", l.canny.low_threshold);
        k.get("high_threshold", l.canny.high_threshold);
        k.get("sigma", l.canny.sigma);
        k.finish();
        r.finish();
    }
    {
        Reader r = root.section("synth_loss");
        auto& l = c.synth_loss;
        Reader w = r.section("weights");
        w.get("prox", l.weights.prox);
        w.get("spa", l.weights.spa);
        w.get("tv_h", l.weights.tv_h);
        w.get("tv_u", l.weights.tv_u);
        w.finish();
        r.get("spa_region", l.spa.region);
        r.get("spa_alpha", l.spa.alpha);
        r.finish();
    }
    read_train(root.section("train_enhance"), c.train_enhance);
    read_train(root.section("train_synth"), c.train_synth);
    {
        Reader r = root.section("textcp");
        r.get("enabled", c.textcp_enabled);
        r.get("n_target", c.textcp.n_target);
        r.get("gamma", c.textcp.gamma);
        r.get("max_attempts", c.textcp.max_attempts);
        r.finish();
    }
    {
        Reader r = root.section("enhance");
        auto& e = c.enhance;
        r.path("checkpoint", e.checkpoint);
        r.path("input_dir", e.input_dir);
        std::string source = edge_source_name(e.edge_source);
        r.get("edge_source", source);
        if (source == "classical") e.edge_source = enhancer::EdgeSource::Classical;
        else if (source == "file") e.edge_source = enhancer::EdgeSource::File;
        else fail(ErrorCode::Config, "enhance.edge_source must be 'classical' or 'file', got '" + source + "'");
        r.path("edge_dir", e.edge_dir);
        r.get("tile", e.tile);
        r.get("tile_size", e.tile_size);
        r.get("tile_overlap", e.tile_overlap);
        r.get("write_edges", e.write_edges);
        r.get("panels", e.panels);
        r.finish();
    }
    {
        Reader r = root.section("synthesize");
        r.path("checkpoint", c.synthesize.checkpoint);
        r.path("input_dir", c.synthesize.input_dir);
        r.get("clamp", c.synthesize.clamp);
        r.finish();
    }
    {
        Reader r = root.section("augment");
        r.get("copies", c.augment.copies);
        r.finish();
    }
    {
        Reader r = root.section("evaluate");
        auto& e = c.evaluate;
        r.path("enhanced_dir", e.enhanced_dir);
        r.path("reference_dir", e.reference_dir);
        r.path("annotation_dir", e.annotation_dir);
        r.path("detection_dir", e.detection_dir);
        r.path("recognition_dir", e.recognition_dir);
        r.finish();
    }
    root.finish();

    c.enhancer.validate();
    c.synth.validate();
    c.enhancer_loss.ms_ssim.validate();
    validate_train(c.train_enhance, "train_enhance");
    validate_train(c.train_synth, "train_synth");
    require(c.enhance.tile_size > c.enhance.tile_overlap && c.enhance.tile_overlap >= 0, ErrorCode::Config,
            "enhance.tile_size must exceed enhance.tile_overlap");
    require(c.augment.copies >= 1, ErrorCode::Config, "augment.copies must be at least 1");
    require(c.synth_loss.spa.region >= 1, ErrorCode::Config, "synth_loss.spa_region must be at least 1");
    return c;
}

json config_to_json(const RunConfig& c) {
    const auto& l = c.enhancer_loss;
    const auto& s = c.synth_loss;
    return {
        {"profile", c.profile},
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()},
        {"data",
         {{"manifest", c.data.manifest.string()},
          {"train_split", c.data.train_split},
          {"test_split", c.data.test_split},
          {"allow_unlabeled", c.data.allow_unlabeled}}},
        {"enhancer",
         {{"levels", c.enhancer.levels},
          {"base_channels", c.enhancer.base_channels},
          {"max_channels", c.enhancer.max_channels},
          {"side_outputs", c.enhancer.side_outputs},
          {"attention_levels", c.enhancer.attention_levels},
          {"side_taps", c.enhancer.side_taps}}},
        {"synth", {{"width", c.synth.width}}},
        {"enhancer_loss",
         {{"weights",
           {{"recons", l.weights.recons}, {"text", l.weights.text}, {"ssim_ms", l.weights.ssim_ms}, {"edge", l.weights.edge}}},
          {"smooth_l1_delta", l.smooth_l1_delta},
          {"edge_lambda", l.edge.lambda},
          {"text_gain", l.text_gain},
          {"ms_ssim",
           {{"scales", l.ms_ssim.scales},
            {"weights", l.ms_ssim.weights},
            {"window", l.ms_ssim.window},
            {"sigma", l.ms_ssim.sigma},
            {"c1", l.ms_ssim.c1},
            {"c2", l.ms_ssim.c2}}},
          {"canny",
           {{"low_threshold", l.canny.low_threshold},
            {"high_threshold", l.canny.high_threshold},
            {"sigma", l.canny.sigma}}}}},
        {"synth_loss",
         {{"weights",
           {{"prox", s.weights.prox}, {"spa", s.weights.spa}, {"tv_h", s.weights.tv_h}, {"tv_u", s.weights.tv_u}}},
          {"spa_region", s.spa.region},
          {"spa_alpha", s.spa.alpha}}},
        {"train_enhance", train_to_json(c.train_enhance)},
        {"train_synth", train_to_json(c.train_synth)},
        {"textcp",
         {{"enabled", c.textcp_enabled},
          {"n_target", c.textcp.n_target},
          {"gamma", c.textcp.gamma},
          {"max_attempts", c.textcp.max_attempts}}},
        {"enhance",
         {{"checkpoint", c.enhance.checkpoint.string()},
          {"input_dir", c.enhance.input_dir.string()},
          {"edge_source", edge_source_name(c.enhance.edge_source)},
          {"edge_dir", c.enhance.edge_dir.string()},
          {"tile", c.enhance.tile},
          {"tile_size", c.enhance.tile_size},
          {"tile_overlap", c.enhance.tile_overlap},
          {"write_edges", c.enhance.write_edges},
          {"panels", c.enhance.panels}}},
        {"synthesize",
         {{"checkpoint", c.synthesize.checkpoint.string()},
          {"input_dir", c.synthesize.input_dir.string()},
          {"clamp", c.synthesize.clamp}}},
        {"augment", {{"copies", c.augment.copies}}},
        {"evaluate",
         {{"enhanced_dir", c.evaluate.enhanced_dir.string()},
          {"reference_dir", c.evaluate.reference_dir.string()},
          {"annotation_dir", c.evaluate.annotation_dir.string()},
          {"detection_dir", c.evaluate.detection_dir.string()},
          {"recognition_dir", c.evaluate.recognition_dir.string()}}},
    };
}

json load_config_document(const fs::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Config, "cannot open config file " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Config, "config " + path.string() + " is not valid JSON: " + e.what());
    }
}

void set_config_value(json& doc, const std::string& dotted_key, const std::string& value) {
    require(!dotted_key.empty(), ErrorCode::Config, "empty config key");
    std::string pointer;
    std::size_t start = 0;
    while (start <= dotted_key.size()) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        require(!part.empty(), ErrorCode::Config, "malformed config key '" + dotted_key + "'");
        pointer += "/" + part;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json parsed = json::parse(value, nullptr, false);
    doc[json::json_pointer(pointer)] = parsed.is_discarded() ? json(value) : parsed;
}

void apply_env_overrides(json& doc, char** environ_block) {
    if (!environ_block) return;
    const std::string prefix = kEnvPrefix;
    for (char** e = environ_block; *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind(prefix, 0) != 0) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(prefix.size(), eq - prefix.size());
        std::string dotted;
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key[i] == '_' && i + 1 < key.size() && key[i + 1] == '_') {
                dotted += '.';
                ++i;
            } else {
                dotted += static_cast<char>(std::tolower(static_cast<unsigned char>(key[i])));
            }
        }
        set_config_value(doc, dotted, entry.substr(eq + 1));
    }
}

} // namespace darktext::pipeline
