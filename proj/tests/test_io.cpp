#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "chirprange/io.hpp"
#include "chirprange/rng.hpp"

using namespace chirprange;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

namespace fs = std::filesystem;

fs::path tmp_path(const std::string& name) {
    return fs::temp_directory_path() / ("chirprange_test_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("waveform CSV round trip", "[io]") {
    Waveform w;
    w.sample_rate_hz = 196'000.0;
    w.t0_s = 0.029;
    w.samples = {0.5, -0.25, 1.0, 0.125, 0.0};
    GaussianRng g(5);
    for (int i = 0; i < 50; ++i) w.samples.push_back(g());

    const auto path = tmp_path("wave.csv");
    save_waveform_csv(w, path.string());
    const Waveform r = load_waveform_csv(path.string());

    CHECK(r.sample_rate_hz == 196'000.0);
    CHECK_THAT(r.t0_s, WithinAbs(0.029, 1e-10));
    REQUIRE(r.size() == w.size());
    // Binary fractions round-trip exactly at 9 significant digits.
    for (int i = 0; i < 5; ++i) CHECK(r.samples[i] == w.samples[i]);
    for (std::size_t i = 5; i < w.size(); ++i)
        CHECK_THAT(r.samples[i], WithinRel(w.samples[i], 1e-8));

    // Byte-deterministic writer.
    const auto path2 = tmp_path("wave2.csv");
    save_waveform_csv(w, path2.string());
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("waveform CSV rejects damaged files", "[io]") {
    const auto path = tmp_path("bad.csv");

    spit(path, "sample_rate_hz,t0_s,n_samples\n1.96000000e+05,0.00000000e+00,3\nsample\n1.0\n2.0\n");
    CHECK_THROWS_AS(load_waveform_csv(path.string()), ParseError);  // declared 3, found 2

    spit(path, "wrong,header\n");
    CHECK_THROWS_AS(load_waveform_csv(path.string()), ParseError);

    spit(path, "sample_rate_hz,t0_s,n_samples\n1.96000000e+05,0.00000000e+00,1\nsample\npotato\n");
    CHECK_THROWS_AS(load_waveform_csv(path.string()), ParseError);

    CHECK_THROWS_AS(load_waveform_csv(tmp_path("does_not_exist.csv").string()), ParseError);

    Waveform w;
    w.sample_rate_hz = 196'000.0;
    w.samples = {0.1, 0.2};
    save_waveform_csv(w, path.string());
    CHECK_THROWS_AS(load_waveform_csv(path.string(), 48'000.0), RateMismatchError);
    CHECK_NOTHROW(load_waveform_csv(path.string(), 196'000.0));
}

TEST_CASE("waveform WAV round trip", "[io]") {
    Waveform w;
    w.sample_rate_hz = 196'000.0;
    w.samples = {0.0, 1.0, -1.0, 0.5, 2.0, -3.0};  // the last two must clamp
    GaussianRng g(17);
    for (int i = 0; i < 100; ++i) w.samples.push_back(0.3 * g());

    const auto path = tmp_path("wave.wav");
    save_waveform_wav(w, path.string());
    CHECK(fs::file_size(path) == 44 + 2 * w.size());

    const Waveform r = load_waveform_wav(path.string());
    CHECK(r.sample_rate_hz == 196'000.0);
    REQUIRE(r.size() == w.size());
    const double lsb = 1.0 / 32767.0;
    CHECK(r.samples[0] == 0.0);
    CHECK(r.samples[1] == 1.0);
    CHECK_THAT(r.samples[4], WithinAbs(1.0, 1e-12));   // clamped
    CHECK_THAT(r.samples[5], WithinAbs(-1.0, lsb));    // clamped to -32768? no: -32767
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double clamped = std::max(-1.0, std::min(1.0, w.samples[i]));
        CHECK_THAT(r.samples[i], WithinAbs(clamped, lsb));
    }

    CHECK_THROWS_AS(load_waveform_wav(path.string(), 48'000.0), RateMismatchError);
    CHECK_NOTHROW(load_waveform_wav(path.string(), 196'000.0));
}

TEST_CASE("WAV loader rejects foreign files", "[io]") {
    const auto path = tmp_path("notwav.wav");
    spit(path, "this is not a RIFF file, not even close......");
    CHECK_THROWS_AS(load_waveform_wav(path.string()), ParseError);

    Waveform w;
    w.sample_rate_hz = 0.0;
    w.samples = {0.1};
    CHECK_THROWS_AS(save_waveform_wav(w, path.string()), std::invalid_argument);
}

TEST_CASE("format dispatch round trips both ways", "[io]") {
    Waveform w;
    w.sample_rate_hz = 48'000.0;
    w.samples = {0.25, -0.75};

    const auto csv = tmp_path("dispatch.csv");
    const auto wav = tmp_path("dispatch.wav");
    save_waveform(w, csv.string(), WaveformFormat::csv_float);
    save_waveform(w, wav.string(), WaveformFormat::wav_pcm16);
    CHECK(load_waveform(csv.string(), WaveformFormat::csv_float).samples == w.samples);
    const Waveform r = load_waveform(wav.string(), WaveformFormat::wav_pcm16);
    CHECK_THAT(r.samples[0], WithinAbs(0.25, 1.0 / 32767.0));
}

TEST_CASE("result records and their CSV form", "[io]") {
    const ResultRecord rec = make_record({1.0, 2.0, 0.5}, 3.0, "maximum", 20.0, 7, 2.9);
    CHECK_THAT(rec.abs_error_m, WithinAbs(0.1, 1e-12));
    CHECK(rec.trial == 7);

    std::vector<ResultRecord> records{
        make_record({1.0, 2.0, 0.5}, 3.0, "maximum", 20.0, 0, 2.9),
        make_record({1.0, 2.0, 0.5}, 3.0, "maximum", 20.0, 1, 3.05),
        make_record({4.653, 2.1, 1.0}, 1.5525, "prominence_65", 0.1, 0, -0.25),
        make_record({4.653, 2.1, 1.0}, 1.5525, "delta_peak", 0.1, 12345, 1.5),
    };

    const auto path = tmp_path("results.csv");
    save_results(records, path.string());
    const auto loaded = load_results(path.string());
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK_THAT(loaded[i].receiver.x, WithinAbs(records[i].receiver.x, 1e-9));
        CHECK_THAT(loaded[i].true_distance_m, WithinAbs(records[i].true_distance_m, 1e-9));
        CHECK(loaded[i].estimator == records[i].estimator);
        CHECK_THAT(loaded[i].snr_db, WithinAbs(records[i].snr_db, 1e-9));
        CHECK(loaded[i].trial == records[i].trial);
        CHECK_THAT(loaded[i].estimated_distance_m,
                   WithinAbs(records[i].estimated_distance_m, 1e-9));
        CHECK_THAT(loaded[i].abs_error_m, WithinAbs(records[i].abs_error_m, 1e-9));
    }

    // Negative estimates (spurious peaks) survive the trip.
    CHECK(loaded[2].estimated_distance_m < 0.0);

    // Empty result sets still carry the header.
    const auto empty_path = tmp_path("empty_results.csv");
    save_results({}, empty_path.string());
    CHECK(load_results(empty_path.string()).empty());
    CHECK(slurp(empty_path) == std::string(kResultsHeader) + "\n");

    // Deterministic bytes.
    const auto path2 = tmp_path("results2.csv");
    save_results(records, path2.string());
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("results loader rejects foreign tables", "[io]") {
    const auto path = tmp_path("badresults.csv");
    spit(path, "a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(load_results(path.string()), ParseError);

    spit(path, std::string(kResultsHeader) + "\n1,2,3\n");
    CHECK_THROWS_AS(load_results(path.string()), ParseError);  // 3 fields, not 9

    spit(path, "");
    CHECK_THROWS_AS(load_results(path.string()), ParseError);
}

TEST_CASE("summary rows serialize one line per group", "[io]") {
    SummaryRow row;
    row.estimator = "maximum";
    row.snr_db = 20.0;
    row.stats.mean = 0.01;
    row.stats.p50 = 0.008;
    row.stats.p95 = 0.02;
    row.stats.p100 = 0.05;
    row.stats.epsilon = 0.002;
    row.stats.sigma = 0.011;
    row.stats.n = 1000;

    const auto path = tmp_path("summary.csv");
    save_summary({row}, path.string());
    const std::string text = slurp(path);
    CHECK(text.rfind("estimator,snr_db,n,mean_abs_error_m,p50_m,p95_m,p100_m,epsilon_m,sigma_m\n",
                     0) == 0);
    CHECK(text.find("maximum,") != std::string::npos);
    CHECK(text.find(",1000,") != std::string::npos);
    // two lines: header + row
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
