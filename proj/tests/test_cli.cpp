#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fracdim/fractal_sets.hpp"
#include "fracdim/generators.hpp"
#include "fracdim/point_set.hpp"
#include "fracdim/wav.hpp"
#include "test_util.hpp"

using namespace fracdim;
using Catch::Approx;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    static testutil::TempDir io;
    static std::atomic<int> counter{0};
    const int id = counter.fetch_add(1);
    const auto out_path = io.file("out_" + std::to_string(id) + ".txt");
    const auto err_path = io.file("err_" + std::to_string(id) + ".txt");

    const std::string cmd = std::string("\"") + FRACDIM_CLI_PATH + "\" " + args + " > \"" +
                            out_path.string() + "\" 2> \"" + err_path.string() + "\"";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return {WEXITSTATUS(rc), testutil::read_text(out_path), testutil::read_text(err_path)};
}

// Value following "key " on its own line of CLI output.
std::string value_after(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + " ", 0) == 0)
            return line.substr(key.size() + 1);
    FAIL("no '" << key << "' line in output:\n" << text);
    return {};
}

double number_after(const std::string& text, const std::string& key) {
    return std::stod(value_after(text, key));
}

void write_tone_wav(const std::filesystem::path& path, const TimeSeries& ts) {
    AudioClip clip;
    clip.sample_rate = static_cast<std::uint32_t>(ts.sample_rate);
    clip.channels = {ts.samples};
    testutil::write_bytes(path, write_wav(clip, SampleFormat::pcm_s16));
}

} // namespace

TEST_CASE("version, help, and usage errors") {
    const CliResult version = run_cli("--version");
    REQUIRE(version.exit_code == 0);
    REQUIRE(version.out.find("fracdim 0.1.0") != std::string::npos);

    const CliResult help = run_cli("--help");
    REQUIRE(help.exit_code == 0);
    REQUIRE(help.out.find("synth") != std::string::npos);
    REQUIRE(help.out.find("corpus") != std::string::npos);

    REQUIRE(run_cli("--no-such-flag").exit_code == 2);
    REQUIRE(run_cli("frobnicate").exit_code == 2);
    REQUIRE(run_cli("").exit_code == 2); // a subcommand is required
    REQUIRE(run_cli("synth sine").exit_code == 2); // --out is required
}

TEST_CASE("synth then analyze round trip") {
    testutil::TempDir dir;
    const std::string wav = dir.file("tone.wav").string();

    const CliResult synth =
        run_cli("synth sine --out " + wav + " --freq 80 --sample-rate 8000 --duration 3");
    REQUIRE(synth.exit_code == 0);
    REQUIRE(synth.out.find("# fracdim") != std::string::npos);
    REQUIRE(synth.out.find("wrote " + wav) != std::string::npos);
    REQUIRE(synth.out.find("24000 frames") != std::string::npos);
    REQUIRE(synth.out.find("clipped_samples") == std::string::npos);

    const CliResult analyze = run_cli("analyze " + wav);
    REQUIRE(analyze.exit_code == 0);
    REQUIRE(analyze.out.rfind("# fracdim", 0) == 0);
    REQUIRE(analyze.out.find("# config ") != std::string::npos);
    REQUIRE(value_after(analyze.out, "windows") == "2");
    REQUIRE(value_after(analyze.out, "failed_windows") == "0");
    REQUIRE(number_after(analyze.out, "summary_max") == Approx(1.009).margin(0.02));
    REQUIRE(value_after(analyze.out, "classification") == "LeastFractal");

    // Same invocation twice is byte-identical.
    const CliResult again = run_cli("analyze " + wav);
    REQUIRE(again.exit_code == 0);
    REQUIRE(again.out == analyze.out);

    const std::string plot = dir.file("fit.txt").string();
    const CliResult with_plot = run_cli("analyze " + wav + " --plotdata " + plot);
    REQUIRE(with_plot.exit_code == 0);
    const std::string plot_text = testutil::read_text(plot);
    REQUIRE(plot_text.rfind("# fracdim", 0) == 0);
    REQUIRE(plot_text.find("offset=0.000000s") != std::string::npos);
    REQUIRE(plot_text.find("offset=1.000000s") != std::string::npos);
}

TEST_CASE("analyze failure modes map to exit codes") {
    testutil::TempDir dir;

    const CliResult missing = run_cli("analyze " + dir.file("nope.wav").string());
    REQUIRE(missing.exit_code == 2);
    REQUIRE(missing.err.find("error:") != std::string::npos);

    const auto garbage = dir.file("garbage.wav");
    testutil::write_text(garbage, "not a wav at all");
    REQUIRE(run_cli("analyze " + garbage.string()).exit_code == 2);

    TimeSeries silent;
    silent.sample_rate = 8000.0;
    silent.samples.assign(4 * 8000, 0.0);
    const auto silent_wav = dir.file("silent.wav");
    write_tone_wav(silent_wav, silent);
    const CliResult degenerate = run_cli("analyze " + silent_wav.string());
    REQUIRE(degenerate.exit_code == 1);
    REQUIRE(degenerate.err.find("error:") != std::string::npos);

    const auto short_wav = dir.file("short.wav");
    write_tone_wav(short_wav, gen_sine(80.0, 8000.0, 1.0));
    REQUIRE(run_cli("analyze " + short_wav.string()).exit_code == 1);
}

TEST_CASE("validate passes on the reference signals") {
    const CliResult res = run_cli("validate");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.out.find("result pass (9/9)") != std::string::npos);
    REQUIRE(res.out.find("ramp_10000") != std::string::npos);
    REQUIRE(res.out.find("weierstrass_1.33") != std::string::npos);
    REQUIRE(res.out.find("noise_seed42") != std::string::npos);
    REQUIRE(res.out.find("\tfail") == std::string::npos);

    // Off-default configs report misses as expected-fail, never as failure.
    const CliResult coarse = run_cli("validate --k-max 4");
    REQUIRE(coarse.exit_code == 0);
    REQUIRE(coarse.out.find("result pass") != std::string::npos);
}

TEST_CASE("boxdim measures the built-in sets") {
    const CliResult koch = run_cli("boxdim koch");
    REQUIRE(koch.exit_code == 0);
    REQUIRE(value_after(koch.out, "set") == "koch");
    REQUIRE(value_after(koch.out, "points") == "4097");
    REQUIRE(number_after(koch.out, "dimension") == Approx(1.2619).margin(0.05));
    REQUIRE(number_after(koch.out, "r_squared") > 0.99);

    const CliResult circle = run_cli("boxdim circle");
    REQUIRE(circle.exit_code == 0);
    REQUIRE(number_after(circle.out, "dimension") == Approx(1.0).margin(0.05));

    const CliResult rabbit = run_cli("boxdim rabbit");
    REQUIRE(rabbit.exit_code == 0);
    REQUIRE(number_after(rabbit.out, "dimension") == Approx(1.3934).margin(0.05));
}

TEST_CASE("boxdim reads external point files") {
    testutil::TempDir dir;

    const auto seg_file = dir.file("segment.txt");
    {
        std::ofstream out(seg_file);
        write_points_text(out, gen_segment(1000));
    }
    const CliResult seg = run_cli("boxdim --points " + seg_file.string());
    REQUIRE(seg.exit_code == 0);
    REQUIRE(number_after(seg.out, "dimension") == Approx(1.0).margin(0.05));

    const auto corners_file = dir.file("corners.txt");
    testutil::write_text(corners_file, "0,0\n0,1\n1,0\n1,1\n");
    REQUIRE(run_cli("boxdim --points " + corners_file.string()).exit_code == 1);

    // --points and a named set are mutually exclusive; neither is an error too.
    REQUIRE(run_cli("boxdim koch --points " + seg_file.string()).exit_code == 2);
    REQUIRE(run_cli("boxdim").exit_code == 2);
    REQUIRE(run_cli("boxdim --points " + dir.file("absent.txt").string()).exit_code == 2);

    const auto plot = dir.file("koch_fit.txt");
    const CliResult fit = run_cli("boxdim koch --level 3 --plotdata " + plot.string());
    REQUIRE(fit.exit_code == 0);
    const std::string plot_text = testutil::read_text(plot);
    REQUIRE(plot_text.find("# koch") != std::string::npos);
    std::istringstream in(plot_text);
    std::string line;
    std::size_t data_lines = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            ++data_lines;
    REQUIRE(data_lines == 12);
}

TEST_CASE("corpus run over a small synthetic manifest") {
    testutil::TempDir dir;
    write_tone_wav(dir.file("sine.wav"), gen_sine(80.0, 8000.0, 5.0));
    write_tone_wav(dir.file("noise.wav"), gen_white_noise(7, 8000.0, 3.0, 0.5));
    write_tone_wav(dir.file("triangle.wav"), gen_triangle(55.0, 8000.0, 4.0));

    const auto manifest = dir.file("manifest.tsv");
    testutil::write_text(manifest,
                         "# test corpus\n" + dir.file("sine.wav").string() +
                             "\ttitle=Sine Tone\torigin=lab\tgenre=tone\n" +
                             dir.file("noise.wav").string() + "\torigin=field\n" +
                             dir.file("triangle.wav").string() + "\ttitle=Tri\torigin=lab\n");

    const std::string csv1 = dir.file("r1.csv").string();
    const std::string json1 = dir.file("r1.json").string();
    const CliResult serial = run_cli("corpus " + manifest.string() + " --jobs 1 --csv " + csv1 +
                                     " --json " + json1);
    REQUIRE(serial.exit_code == 0);
    REQUIRE(serial.err.find("analyzed 3 track(s), 0 failed") != std::string::npos);
    REQUIRE(serial.err.find("wrote " + csv1) != std::string::npos);

    const std::string csv4 = dir.file("r4.csv").string();
    const std::string json4 = dir.file("r4.json").string();
    const CliResult parallel = run_cli("corpus " + manifest.string() + " --jobs 4 --csv " + csv4 +
                                       " --json " + json4);
    REQUIRE(parallel.exit_code == 0);
    REQUIRE(testutil::read_text(csv1) == testutil::read_text(csv4));
    REQUIRE(testutil::read_text(json1) == testutil::read_text(json4));

    const std::string csv = testutil::read_text(csv1);
    REQUIRE(csv.rfind("title,path,tags,summary_max,summary_mean,classification,"
                      "window_count,failed_windows,config_fingerprint\n",
                      0) == 0);
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line); // header
    std::getline(rows, line);
    REQUIRE(line.rfind("Sine Tone,", 0) == 0);
    REQUIRE(line.find("LeastFractal") != std::string::npos);
    REQUIRE(line.find("genre=tone;origin=lab;title=Sine Tone") != std::string::npos);
    std::getline(rows, line);
    REQUIRE(line.rfind("noise,", 0) == 0);
    REQUIRE(line.find("HighlyFractal") != std::string::npos);

    const CliResult agg = run_cli("corpus " + manifest.string() + " --aggregate origin");
    REQUIRE(agg.exit_code == 0);
    REQUIRE(agg.out.rfind("origin,max_dimension,title\n", 0) == 0);
    REQUIRE(agg.out.find("\nfield,") != std::string::npos);
    REQUIRE(agg.out.find("\nlab,") != std::string::npos);

    const CliResult plain = run_cli("corpus " + manifest.string() + " --jobs 2");
    REQUIRE(plain.exit_code == 0);
    REQUIRE(plain.out.rfind("title,path,tags,", 0) == 0);
}

TEST_CASE("corpus failure handling") {
    testutil::TempDir dir;

    REQUIRE(run_cli("corpus " + dir.file("absent.tsv").string()).exit_code == 2);

    const auto bad = dir.file("bad.tsv");
    testutil::write_text(bad, "a.wav\tnot-a-tag\n");
    REQUIRE(run_cli("corpus " + bad.string()).exit_code == 2);

    const auto all_missing = dir.file("missing.tsv");
    testutil::write_text(all_missing, dir.file("gone1.wav").string() + "\n" +
                                          dir.file("gone2.wav").string() + "\n");
    const CliResult res = run_cli("corpus " + all_missing.string());
    REQUIRE(res.exit_code == 1);
    REQUIRE(res.err.find("2 failed") != std::string::npos);

    // One sound track keeps the batch alive; the failed row has empty fields.
    write_tone_wav(dir.file("ok.wav"), gen_sine(80.0, 8000.0, 3.0));
    const auto mixed = dir.file("mixed.tsv");
    testutil::write_text(mixed, dir.file("ok.wav").string() + "\n" +
                                    dir.file("gone1.wav").string() + "\n");
    const CliResult part = run_cli("corpus " + mixed.string());
    REQUIRE(part.exit_code == 0);
    REQUIRE(part.err.find("1 failed") != std::string::npos);
    REQUIRE(part.out.find(",,,,") != std::string::npos);
}

TEST_CASE("corpus plotdata of a ramp recovers the unit slope") {
    testutil::TempDir dir;
    const std::string wav = dir.file("ramp.wav").string();
    const CliResult synth =
        run_cli("synth ramp --n 132300 --out " + wav + " --bit-depth f32");
    REQUIRE(synth.exit_code == 0);

    const auto manifest = dir.file("ramp.tsv");
    testutil::write_text(manifest, wav + "\ttitle=Ramp\n");

    const std::string plot = dir.file("ramp_fit.txt").string();
    const CliResult corpus = run_cli("corpus " + manifest.string() + " --plotdata " + plot);
    REQUIRE(corpus.exit_code == 0);

    const std::string text = testutil::read_text(plot);
    REQUIRE(text.rfind("# Ramp", 0) == 0);

    std::vector<double> xs, ys;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        double x = 0.0, y = 0.0;
        REQUIRE((fields >> x >> y));
        xs.push_back(x);
        ys.push_back(y);
    }
    REQUIRE(xs.size() == 11);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    REQUIRE(slope == Approx(-1.0).margin(1e-3));
}

TEST_CASE("synth reports weierstrass parameters and rejects bad input") {
    testutil::TempDir dir;
    const std::string wav = dir.file("w.wav").string();
    const CliResult res = run_cli("synth weierstrass --a 0.5 --b 3 --out " + wav +
                                  " --duration 0.1 --sample-rate 8000");
    REQUIRE(res.exit_code == 0);
    REQUIRE(value_after(res.out, "theoretical_dimension") == "1.369070");
    REQUIRE(value_after(res.out, "n_terms") == "20");

    // a outside (0, 1) is a usage error
    REQUIRE(run_cli("synth weierstrass --a 1.5 --b 3 --out " + wav).exit_code == 2);
    // unwritable output path
    REQUIRE(run_cli("synth sine --out /nonexistent/dir/x.wav --duration 0.1").exit_code == 2);
}
