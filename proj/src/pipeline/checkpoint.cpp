#include "pipeline/checkpoint.hpp"

#include "core/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace darktext::pipeline {

namespace {

constexpr char kMagic[8] = {'D', 'K', 'T', 'X', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

using json = nlohmann::json;

json shape_json(const nn::Shape& s) { return json::array({s.n, s.c, s.h, s.w}); }

void add_group(json& table, const char* group, const std::map<std::string, nn::Tensor>& tensors) {
    for (const auto& [name, t] : tensors) table.push_back({{"group", group}, {"name", name}, {"shape", shape_json(t.shape())}});
}

template <class T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(static_cast<bool>(in), ErrorCode::Data, "checkpoint " + path.string() + " is truncated");
    return v;
}

void copy_into(const std::string& name, const nn::Tensor& src, nn::Tensor& dst) {
    require(src.shape() == dst.shape(), ErrorCode::Data,
            "checkpoint tensor '" + name + "' has shape " + src.shape().str() + ", model expects " + dst.shape().str());
    dst = src;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    json table = json::array();
    add_group(table, "param", ckpt.params);
    add_group(table, "adam_m", ckpt.adam_m);
    add_group(table, "adam_v", ckpt.adam_v);
    const json header = {{"kind", ckpt.kind},       {"config", ckpt.config},         {"epoch", ckpt.epoch},
                         {"step", ckpt.step},       {"rng_state", ckpt.rng_state}, {"adam_steps", ckpt.adam_steps},
                         {"tensors", table}};
    const std::string text = header.dump();

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::Io, "cannot write checkpoint " + tmp.string());
        out.write(kMagic, sizeof(kMagic));
        write_raw(out, kVersion);
        write_raw(out, static_cast<std::uint64_t>(text.size()));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (const auto* group : {&ckpt.params, &ckpt.adam_m, &ckpt.adam_v}) {
            for (const auto& [_, t] : *group) {
                out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
            }
        }
        require(static_cast<bool>(out), ErrorCode::Io, "failed while writing checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open checkpoint " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    require(in && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorCode::Data,
            path.string() + " is not a checkpoint file");
    const auto version = read_raw<std::uint32_t>(in, path);
    require(version == kVersion, ErrorCode::Data,
            "checkpoint " + path.string() + " has unsupported version " + std::to_string(version));
    const auto header_len = read_raw<std::uint64_t>(in, path);
    std::string text(header_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_len));
    require(static_cast<bool>(in), ErrorCode::Data, "checkpoint " + path.string() + " is truncated");

    json header;
    try {
        header = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::Data, "checkpoint " + path.string() + " has a corrupt header: " + e.what());
    }
    Checkpoint ckpt;
    try {
        ckpt.kind = header.at("kind").get<std::string>();
        ckpt.config = header.at("config");
        ckpt.epoch = header.at("epoch").get<long long>();
        ckpt.step = header.at("step").get<long long>();
        ckpt.rng_state = header.at("rng_state").get<std::string>();
        ckpt.adam_steps = header.at("adam_steps").get<long long>();
        for (const auto& entry : header.at("tensors")) {
            const auto dims = entry.at("shape").get<std::array<int, 4>>();
            nn::Tensor t(nn::Shape{dims[0], dims[1], dims[2], dims[3]});
            in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
            require(static_cast<bool>(in), ErrorCode::Data, "checkpoint " + path.string() + " is truncated");
            const auto group = entry.at("group").get<std::string>();
            const auto name = entry.at("name").get<std::string>();
            if (group == "param") ckpt.params.emplace(name, std::move(t));
            else if (group == "adam_m") ckpt.adam_m.emplace(name, std::move(t));
            else if (group == "adam_v") ckpt.adam_v.emplace(name, std::move(t));
            else fail(ErrorCode::Data, "checkpoint " + path.string() + " has unknown tensor group '" + group + "'");
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::Data, "checkpoint " + path.string() + " has a malformed header: " + e.what());
    }
    return ckpt;
}

void capture_state(Checkpoint& ckpt, const nn::ParameterStore& params, const nn::Adam& adam) {
    ckpt.params.clear();
    for (const auto& [name, v] : params.entries()) ckpt.params.emplace(name, v.value());
    ckpt.adam_m = adam.first_moments();
    ckpt.adam_v = adam.second_moments();
    ckpt.adam_steps = adam.steps();
}

void restore_parameters(const Checkpoint& ckpt, nn::ParameterStore& params) {
    require(ckpt.params.size() == params.entries().size(), ErrorCode::Data,
            "checkpoint holds " + std::to_string(ckpt.params.size()) + " parameters, model has " +
                std::to_string(params.entries().size()));
    for (const auto& [name, v] : params.entries()) {
        auto it = ckpt.params.find(name);
        require(it != ckpt.params.end(), ErrorCode::Data, "checkpoint lacks parameter '" + name + "'");
        nn::Var handle = v;
        copy_into(name, it->second, handle.mutable_value());
    }
}

void restore_state(const Checkpoint& ckpt, nn::ParameterStore& params, nn::Adam& adam) {
    restore_parameters(ckpt, params);
    adam.first_moments() = ckpt.adam_m;
    adam.second_moments() = ckpt.adam_v;
    adam.set_steps(ckpt.adam_steps);
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string() + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1, ErrorCode::Io, "SHA-256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

} // namespace darktext::pipeline
