// artifacts.hpp: output directory handling: CSV writers, config echo, and the
// manifest with per-file SHA-256 checksums.

#pragma once

#include "jch/cli/config.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#ifndef JCH_VERSION
#define JCH_VERSION "unknown"
#endif

namespace jch::cli {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string sha256_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + p.string() + "' for checksum");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        bool first = true;
        for (const auto& h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    /// Numbers are written with 12 significant digits; strings verbatim.
    template <class... Ts>
    void row(const Ts&... values) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
        out_ << '\n';
    }

private:
    template <class T>
    static std::string cell(const T& v) {
        if constexpr (std::is_same_v<T, std::string>)
            return v;
        else if constexpr (std::is_convertible_v<T, const char*>)
            return std::string(v);
        else if constexpr (std::is_same_v<T, bool>)
            return v ? "1" : "0";
        else if constexpr (std::is_integral_v<T>)
            return std::to_string(v);
        else
            return format_number(static_cast<double>(v));
    }

    std::ofstream out_;
};

/// One run's output directory. Files are registered as they are created so a failed
/// run still lists (and checksums) what it produced.
class RunContext {
public:
    RunContext(std::filesystem::path dir, const ExperimentConfig& cfg) : dir_(std::move(dir)), cfg_(cfg) {
        std::filesystem::create_directories(dir_);
        start_ = std::chrono::steady_clock::now();
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }
    const ExperimentConfig& config() const noexcept { return cfg_; }

    std::filesystem::path file(const std::string& name) {
        files_.push_back(name);
        return dir_ / name;
    }

    CsvWriter csv(const std::string& name, std::initializer_list<std::string> header) { return CsvWriter(file(name), header); }

    void write_json(const std::string& name, const json& j) {
        std::ofstream out(file(name));
        out << j.dump(2) << '\n';
    }

    void echo_config() {
        std::ofstream out(file("config.echo"));
        out << config_to_json(cfg_).dump(2) << '\n';
    }

    /// Writes manifest.json; `error` non-empty marks a failed run.
    void write_manifest(const std::string& error = {}) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json files = json::array();
        for (const auto& f : files_) {
            const auto p = dir_ / f;
            if (!std::filesystem::exists(p)) continue;
            files.push_back({{"name", f}, {"sha256", sha256_file(p)}, {"bytes", std::filesystem::file_size(p)}});
        }
        json m = {{"version", JCH_VERSION},       {"experiment", cfg_.experiment}, {"seed", cfg_.seed},
                  {"workers", resolve_workers(cfg_.workers)}, {"wall_time_s", wall},
                  {"status", error.empty() ? "ok" : "failed"}, {"files", files}};
        if (!error.empty()) m["error"] = error;
        std::ofstream out(dir_ / "manifest.json");
        out << m.dump(2) << '\n';
    }

private:
    std::filesystem::path dir_;
    ExperimentConfig cfg_;
    std::vector<std::string> files_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace jch::cli
