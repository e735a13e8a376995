#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chirprange/results.hpp"
#include "chirprange/stats.hpp"
#include "chirprange/waveform.hpp"

namespace chirprange {

enum class WaveformFormat { wav_pcm16, csv_float };

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RateMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Fixed %.8e formatting (9 significant digits): byte-deterministic output and
// exact round trip for anything measured at single precision or coarser.
inline std::string format_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

inline double parse_float(const std::string& text, const std::string& what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(what + ": bad number '" + text + "'");
    return v;
}

inline long parse_long(const std::string& text, const std::string& what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin) throw ParseError(what + ": bad integer '" + text + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open for reading: " + path);
    return in;
}

inline void put_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline std::uint32_t get_u32(const std::string& s, std::size_t at) {
    return static_cast<std::uint8_t>(s[at]) | (static_cast<std::uint8_t>(s[at + 1]) << 8) |
           (static_cast<std::uint8_t>(s[at + 2]) << 16) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[at + 3])) << 24);
}

inline std::uint16_t get_u16(const std::string& s, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<std::uint8_t>(s[at]) |
                                      (static_cast<std::uint8_t>(s[at + 1]) << 8));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// csv_float: metadata header (rate, start time, declared length for
// truncation detection) followed by one sample per line.
// ---------------------------------------------------------------------------

inline void save_waveform_csv(const Waveform& w, const std::string& path) {
    auto out = detail::open_out(path);
    std::string body;
    body += "sample_rate_hz,t0_s,n_samples\n";
    body += detail::format_float(w.sample_rate_hz) + "," + detail::format_float(w.t0_s) + "," +
            std::to_string(w.samples.size()) + "\n";
    body += "sample\n";
    for (double s : w.samples) body += detail::format_float(s) + "\n";
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

inline Waveform load_waveform_csv(const std::string& path, double expected_rate_hz = 0.0) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line) || detail::split_csv(line) !=
                                       std::vector<std::string>{"sample_rate_hz", "t0_s",
                                                                "n_samples"})
        throw ParseError(path + ": missing waveform metadata header");
    if (!std::getline(in, line)) throw ParseError(path + ": missing metadata row");
    const auto meta = detail::split_csv(line);
    if (meta.size() != 3) throw ParseError(path + ": malformed metadata row");
    Waveform w;
    w.sample_rate_hz = detail::parse_float(meta[0], path);
    w.t0_s = detail::parse_float(meta[1], path);
    const long declared = detail::parse_long(meta[2], path);
    if (declared < 0) throw ParseError(path + ": negative sample count");
    if (!std::getline(in, line) || line != "sample" )
        throw ParseError(path + ": missing sample column header");
    w.samples.reserve(static_cast<std::size_t>(declared));
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        w.samples.push_back(detail::parse_float(line, path));
    }
    if (w.samples.size() != static_cast<std::size_t>(declared))
        throw ParseError(path + ": truncated, declared " + std::to_string(declared) +
                         " samples but found " + std::to_string(w.samples.size()));
    if (expected_rate_hz > 0.0 && w.sample_rate_hz != expected_rate_hz)
        throw RateMismatchError(path + ": file rate " + std::to_string(w.sample_rate_hz) +
                                " Hz, expected " + std::to_string(expected_rate_hz));
    return w;
}

// ---------------------------------------------------------------------------
// wav_pcm16: canonical mono 16-bit RIFF. Samples clamp to [-1, 1] and scale
// by 32767, so a round trip moves each value by at most one LSB (2^-15).
// ---------------------------------------------------------------------------

inline void save_waveform_wav(const Waveform& w, const std::string& path) {
    if (!(w.sample_rate_hz > 0.0))
        throw std::invalid_argument("save_waveform_wav: sample rate must be > 0");
    const auto n = static_cast<std::uint32_t>(w.samples.size());
    const auto rate = static_cast<std::uint32_t>(std::llround(w.sample_rate_hz));
    std::string s;
    s.reserve(44 + 2 * n);
    s += "RIFF";
    detail::put_u32(s, 36 + 2 * n);
    s += "WAVEfmt ";
    detail::put_u32(s, 16);
    detail::put_u16(s, 1);  // PCM
    detail::put_u16(s, 1);  // mono
    detail::put_u32(s, rate);
    detail::put_u32(s, rate * 2);  // byte rate
    detail::put_u16(s, 2);         // block align
    detail::put_u16(s, 16);        // bits per sample
    s += "data";
    detail::put_u32(s, 2 * n);
    for (double x : w.samples) {
        const double clamped = std::max(-1.0, std::min(1.0, x));
        const auto q = static_cast<std::int16_t>(std::llround(clamped * 32767.0));
        detail::put_u16(s, static_cast<std::uint16_t>(q));
    }
    auto out = detail::open_out(path);
    out << s;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

inline Waveform load_waveform_wav(const std::string& path, double expected_rate_hz = 0.0) {
    auto in = detail::open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string s = buf.str();
    if (s.size() < 44 || s.compare(0, 4, "RIFF") != 0 || s.compare(8, 4, "WAVE") != 0)
        throw ParseError(path + ": not a RIFF/WAVE file");
    Waveform w;
    bool have_fmt = false, have_data = false;
    std::size_t at = 12;
    while (at + 8 <= s.size()) {
        const std::string id = s.substr(at, 4);
        const std::uint32_t len = detail::get_u32(s, at + 4);
        if (at + 8 + len > s.size())
            throw ParseError(path + ": truncated chunk '" + id + "'");
        if (id == "fmt ") {
            if (len < 16) throw ParseError(path + ": short fmt chunk");
            if (detail::get_u16(s, at + 8) != 1) throw ParseError(path + ": not PCM");
            if (detail::get_u16(s, at + 10) != 1) throw ParseError(path + ": not mono");
            if (detail::get_u16(s, at + 8 + 14) != 16)
                throw ParseError(path + ": not 16-bit");
            w.sample_rate_hz = detail::get_u32(s, at + 12);
            have_fmt = true;
        } else if (id == "data") {
            if (len % 2 != 0) throw ParseError(path + ": odd data chunk length");
            w.samples.reserve(len / 2);
            for (std::size_t i = 0; i < len; i += 2) {
                const auto raw = static_cast<std::int16_t>(detail::get_u16(s, at + 8 + i));
                w.samples.push_back(static_cast<double>(raw) / 32767.0);
            }
            have_data = true;
        }
        at += 8 + len + (len % 2);  // chunks are word aligned
    }
    if (!have_fmt || !have_data) throw ParseError(path + ": missing fmt or data chunk");
    if (expected_rate_hz > 0.0 &&
        std::llround(expected_rate_hz) != std::llround(w.sample_rate_hz))
        throw RateMismatchError(path + ": file rate " + std::to_string(w.sample_rate_hz) +
                                " Hz, expected " + std::to_string(expected_rate_hz));
    return w;
}

inline void save_waveform(const Waveform& w, const std::string& path, WaveformFormat format) {
    if (format == WaveformFormat::csv_float)
        save_waveform_csv(w, path);
    else
        save_waveform_wav(w, path);
}

inline Waveform load_waveform(const std::string& path, WaveformFormat format,
                              double expected_rate_hz = 0.0) {
    return format == WaveformFormat::csv_float ? load_waveform_csv(path, expected_rate_hz)
                                               : load_waveform_wav(path, expected_rate_hz);
}

// ---------------------------------------------------------------------------
// Results CSV: one row per estimate, fixed header, fixed float format, rows
// already ordered by the caller (receiver-major, then estimator, then trial).
// ---------------------------------------------------------------------------

inline constexpr const char* kResultsHeader =
    "receiver_x,receiver_y,receiver_z,true_distance_m,estimator,snr_db,trial,"
    "estimated_distance_m,abs_error_m";

inline void save_results(const std::vector<ResultRecord>& records, const std::string& path) {
    auto out = detail::open_out(path);
    std::string body = std::string(kResultsHeader) + "\n";
    for (const auto& r : records) {
        body += detail::format_float(r.receiver.x) + ",";
        body += detail::format_float(r.receiver.y) + ",";
        body += detail::format_float(r.receiver.z) + ",";
        body += detail::format_float(r.true_distance_m) + ",";
        body += r.estimator + ",";
        body += detail::format_float(r.snr_db) + ",";
        body += std::to_string(r.trial) + ",";
        body += detail::format_float(r.estimated_distance_m) + ",";
        body += detail::format_float(r.abs_error_m) + "\n";
    }
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

inline std::vector<ResultRecord> load_results(const std::string& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsHeader) throw ParseError(path + ": unexpected results header");
    std::vector<ResultRecord> records;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 9) throw ParseError(path + ": expected 9 fields, got row '" + line + "'");
        ResultRecord r;
        r.receiver = {detail::parse_float(f[0], path), detail::parse_float(f[1], path),
                      detail::parse_float(f[2], path)};
        r.true_distance_m = detail::parse_float(f[3], path);
        r.estimator = f[4];
        r.snr_db = detail::parse_float(f[5], path);
        r.trial = detail::parse_long(f[6], path);
        r.estimated_distance_m = detail::parse_float(f[7], path);
        r.abs_error_m = detail::parse_float(f[8], path);
        records.push_back(std::move(r));
    }
    return records;
}

// Aggregate summary table, one row per (estimator, snr) group.
struct SummaryRow {
    std::string estimator;
    double snr_db = 0.0;
    ErrorStats stats;
};

inline void save_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
    auto out = detail::open_out(path);
    std::string body = "estimator,snr_db,n,mean_abs_error_m,p50_m,p95_m,p100_m,epsilon_m,sigma_m\n";
    for (const auto& row : rows) {
        body += row.estimator + ",";
        body += detail::format_float(row.snr_db) + ",";
        body += std::to_string(row.stats.n) + ",";
        body += detail::format_float(row.stats.mean) + ",";
        body += detail::format_float(row.stats.p50) + ",";
        body += detail::format_float(row.stats.p95) + ",";
        body += detail::format_float(row.stats.p100) + ",";
        body += detail::format_float(row.stats.epsilon) + ",";
        body += detail::format_float(row.stats.sigma) + "\n";
    }
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace chirprange
