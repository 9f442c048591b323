// Command-line front end over the darktext C API.
#include "darktext/darktext.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

namespace {

struct ConfigDeleter {
    void operator()(dt_config* c) const { dt_config_free(c); }
};

int report(dt_status status) {
    std::fprintf(stderr, "toolkit: %s\n", dt_last_error());
    return dt_exit_code(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-light text image enhancement toolkit"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;

    const char* tasks[][2] = {
        {"train-enhance", "Train the edge-aware enhancer"},
        {"train-synth", "Train the low-light synthesis curve network"},
        {"enhance", "Enhance a directory of images with a trained checkpoint"},
        {"synthesize", "Turn well-lit images into synthetic low-light images"},
        {"augment", "Write Text-CP augmented copies of the training split"},
        {"evaluate", "Score enhanced images against references"},
    };
    for (const auto& [name, help] : tasks) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string task = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();

    dt_config* raw = nullptr;
    if (dt_status s = dt_config_load(config_path.c_str(), &raw); s != DT_OK) return report(s);
    std::unique_ptr<dt_config, ConfigDeleter> config(raw);
    if (dt_status s = dt_config_apply_env(config.get()); s != DT_OK) return report(s);

    const bool has_seed = sub->count("--seed") > 0;
    const bool has_out = sub->count("--out") > 0;
    const dt_status s = dt_run_task(config.get(), task.c_str(), has_out ? out_dir.c_str() : nullptr,
                                    has_seed ? &seed : nullptr);
    if (s != DT_OK) return report(s);
    std::printf("%s: done\n", task.c_str());
    return 0;
}
