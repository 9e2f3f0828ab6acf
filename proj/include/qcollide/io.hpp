#pragma once

// Serialization and run records: parameter files, CSV formatting, content
// digests, and the per-run manifest.
//
// Conventions: CSV files are UTF-8 with a header row and LF line endings;
// floating-point CSV fields carry 17 significant digits (lossless for IEEE
// doubles). JSON floats use the shortest representation that parses back to
// the identical double.

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "model.hpp"
#include "thermo.hpp"

namespace qcollide {

inline constexpr const char* version_string = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                             std::chars_format::general, 17);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError(context + ": cannot parse number '" + s + "'");
    return v;
}

// ---------------------------------------------------------------------------
// Parameter files (flat key=value, '#' comments)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

// Parse key=value text onto defaults. Recognized keys: J, Delta, B1, B2,
// gamma, n1, n2, tau. Unknown keys are usage errors, not warnings.
inline ModelParams parse_config_text(const std::string& text,
                                     ModelParams defaults = ModelParams{}) {
    ModelParams p = defaults;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        double v = parse_double(value, "config key '" + key + "'");
        if (key == "J") p.J = v;
        else if (key == "Delta") p.Delta = v;
        else if (key == "B1") p.B1 = v;
        else if (key == "B2") p.B2 = v;
        else if (key == "gamma") p.gamma = v;
        else if (key == "n1") p.n1 = v;
        else if (key == "n2") p.n2 = v;
        else if (key == "tau") p.tau = v;
        else
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
    return p;
}

inline ModelParams load_config(const std::filesystem::path& path,
                               ModelParams defaults = ModelParams{}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), defaults);
}

inline std::string config_text(const ModelParams& p) {
    std::string out;
    out += "J=" + format_double(p.J) + "\n";
    out += "Delta=" + format_double(p.Delta) + "\n";
    out += "B1=" + format_double(p.B1) + "\n";
    out += "B2=" + format_double(p.B2) + "\n";
    out += "gamma=" + format_double(p.gamma) + "\n";
    out += "n1=" + format_double(p.n1) + "\n";
    out += "n2=" + format_double(p.n2) + "\n";
    out += "tau=" + format_double(p.tau) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

// Binary mode so line endings are LF on every platform.
inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) row += ',';
        row += fields[k];
    }
    row += '\n';
    return row;
}

// One record, one scenario, stable column order.
inline std::string thermo_csv_header() {
    return "scenario,phi_or_seed,W_partial,Q1_partial,Q2_partial,W_U,W_complete,"
           "Q1_complete,Q2_complete,Sigma_partial,Sigma_complete,mode\n";
}

inline std::string thermo_csv_row(Scenario s, const std::string& phi_or_seed,
                                  const ThermoRecord& r) {
    return csv_join({to_string(s), phi_or_seed, format_double(r.W_partial),
                     format_double(r.Q1_partial), format_double(r.Q2_partial),
                     format_double(r.W_U), format_double(r.W_complete),
                     format_double(r.Q1_complete), format_double(r.Q2_complete),
                     format_double(r.Sigma_partial), format_double(r.Sigma_complete),
                     to_string(r.mode(s))});
}

// ---------------------------------------------------------------------------
// Content digests (SHA-256)
// ---------------------------------------------------------------------------

inline std::string sha256_hex(const void* data, std::size_t n) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256_hex: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file: cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256_file: context allocation failed");
    if (!EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr)) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256_file: init failed");
    }
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::streamsize got = in.gcount();
        if (got > 0 && !EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got))) {
            EVP_MD_CTX_free(ctx);
            throw std::runtime_error("sha256_file: update failed");
        }
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_DigestFinal_ex(ctx, md, &len)) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256_file: final failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline std::string iso8601_utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    return nlohmann::ordered_json{{"J", p.J},         {"Delta", p.Delta}, {"B1", p.B1},
                                  {"B2", p.B2},       {"gamma", p.gamma}, {"n1", p.n1},
                                  {"n2", p.n2},       {"tau", p.tau}};
}

struct RunManifest {
    std::string command;
    ModelParams params;
    nlohmann::ordered_json settings; // command-specific resolved options
    std::uint64_t seed = 0;
    int workers = 1;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs; // filenames relative to the output directory
};

// Digest the listed output files and write manifest.json into outdir.
inline std::filesystem::path write_manifest(const std::filesystem::path& outdir,
                                            const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["version"] = version_string;
    j["config"] = params_json(m.params);
    j["settings"] = m.settings.is_null() ? nlohmann::ordered_json::object() : m.settings;
    j["seed"] = m.seed;
    j["workers"] = m.workers;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at.empty() ? iso8601_utc_now() : m.finished_at;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const std::string& name : m.outputs) {
        files.push_back({{"file", name}, {"sha256", sha256_file(outdir / name)}});
    }
    j["outputs"] = files;

    std::filesystem::path path = outdir / "manifest.json";
    std::ofstream out = open_output(path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write_manifest: write failed");
    return path;
}

} // namespace qcollide
