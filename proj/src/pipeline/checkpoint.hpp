#pragma once

#include "nn/adam.hpp"
#include "nn/layers.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace darktext::pipeline {

// Everything needed to rebuild a model and continue training bit-exactly.
struct Checkpoint {
    std::string kind;                       // "enhancer" or "synth"
    nlohmann::json config;                  // the full run configuration
    long long epoch = 0;                    // completed epochs
    long long step = 0;                     // completed optimizer steps
    std::string rng_state;                  // textual std::mt19937_64 state
    long long adam_steps = 0;
    std::map<std::string, nn::Tensor> params;
    std::map<std::string, nn::Tensor> adam_m;
    std::map<std::string, nn::Tensor> adam_v;
};

// Layout: "DKTXCKPT", u32 version, u64 header length, JSON header, then the
// tensors as little-endian doubles in header order. Written to a temporary
// file and renamed, so an interrupted save never clobbers the previous file.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void capture_state(Checkpoint& ckpt, const nn::ParameterStore& params, const nn::Adam& adam);
// Copies parameter values and optimizer moments back; names and shapes
// must match the live model.
void restore_state(const Checkpoint& ckpt, nn::ParameterStore& params, nn::Adam& adam);
void restore_parameters(const Checkpoint& ckpt, nn::ParameterStore& params);

// Lower-case hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

} // namespace darktext::pipeline
