// fracdim: fractal-dimension toolkit CLI.
//
// Exit codes: 0 success, 1 analysis or validation failure, 2 usage or
// I/O errors (bad flags, missing files, undecodable input).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracdim/fracdim.hpp"

namespace {

using namespace fracdim;

std::vector<std::uint8_t> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument(path + ": cannot open file");
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(std::max<std::streamoff>(size, 0)));
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
        throw std::invalid_argument(path + ": cannot read file");
    return bytes;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument(path + ": cannot open for writing");
    out << content;
    if (!out)
        throw std::invalid_argument(path + ": write failed");
}

SampleFormat parse_depth(const std::string& s) {
    if (s == "8") return SampleFormat::pcm_u8;
    if (s == "16") return SampleFormat::pcm_s16;
    if (s == "24") return SampleFormat::pcm_s24;
    if (s == "32") return SampleFormat::pcm_s32;
    if (s == "f32") return SampleFormat::ieee_float32;
    throw std::invalid_argument("unknown bit depth: " + s);
}

std::string fmt6(double v) { return detail::format_fixed(v, 6); }

struct SynthArgs {
    std::string kind;
    std::string out;
    double freq = 440.0;
    double sample_rate = 44100.0;
    double duration = 2.0;
    double amplitude = 1.0;
    std::uint64_t seed = 42;
    double a = 0.5;
    double b = 5.0;
    std::size_t n = 10000;
    std::string depth = "16";
};

int cmd_synth(const SynthArgs& args) {
    TimeSeries ts;
    std::cout << "# fracdim " << kVersion << "\n";
    if (args.kind == "sine") {
        ts = gen_sine(args.freq, args.sample_rate, args.duration, args.amplitude);
    } else if (args.kind == "square") {
        ts = gen_square(args.freq, args.sample_rate, args.duration, args.amplitude);
    } else if (args.kind == "triangle") {
        ts = gen_triangle(args.freq, args.sample_rate, args.duration, args.amplitude);
    } else if (args.kind == "weierstrass") {
        const WeierstrassParams params = weierstrass_params(args.a, args.b);
        ts = gen_weierstrass(params, args.sample_rate, args.duration);
        // Rescale into [-amplitude, amplitude] so quantization cannot clip;
        // affine scaling leaves the dimension untouched.
        const double bound = (1.0 - std::pow(params.amplitude_ratio, params.n_terms)) /
                             (1.0 - params.amplitude_ratio);
        for (double& v : ts.samples)
            v *= args.amplitude / bound;
        std::cout << "theoretical_dimension " << fmt6(params.theoretical_dimension) << "\n";
        std::cout << "n_terms " << params.n_terms << "\n";
    } else if (args.kind == "noise") {
        ts = gen_white_noise(args.seed, args.sample_rate, args.duration, args.amplitude);
    } else if (args.kind == "ramp") {
        ts = gen_ramp(args.n, args.sample_rate);
        const double half = static_cast<double>(args.n - 1) / 2.0;
        for (double& v : ts.samples)
            v = (v - half) / half * args.amplitude;
    } else {
        throw std::invalid_argument("unknown signal kind: " + args.kind);
    }

    AudioClip clip;
    clip.sample_rate = static_cast<std::uint32_t>(ts.sample_rate);
    clip.channels.push_back(std::move(ts.samples));

    std::size_t clipped = 0;
    const auto bytes = write_wav(clip, parse_depth(args.depth), &clipped);
    std::ofstream out(args.out, std::ios::binary);
    if (!out)
        throw std::invalid_argument(args.out + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::invalid_argument(args.out + ": write failed");

    std::cout << "wrote " << args.out << " (" << clip.frame_count() << " frames, "
              << clip.sample_rate << " Hz, " << args.depth << " bit)\n";
    if (clipped > 0)
        std::cout << "clipped_samples " << clipped << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string path;
    double window = 2.0;
    double hop = 1.0;
    std::size_t k_max = 0;
    std::string plotdata;
};

int cmd_analyze(const AnalyzeArgs& args) {
    AnalysisConfig cfg;
    cfg.plan.window_seconds = args.window;
    cfg.plan.hop_seconds = args.hop;
    cfg.higuchi.k_max = args.k_max;

    const auto bytes = read_binary(args.path);
    const AudioClip clip = parse_wav(bytes);
    const TrackRecord rec = analyze_clip(clip, cfg);

    std::cout << "# fracdim " << kVersion << "\n";
    std::cout << "# config " << rec.config_fingerprint << "\n";
    std::cout << "# file " << args.path << ": " << clip.frame_count() << " frames, "
              << clip.channels.size() << " channel(s), " << clip.sample_rate << " Hz\n";
    std::cout << "offset_seconds\tdimension\tr_squared\tscales\texcluded\n";
    for (const auto& we : rec.window_estimates)
        std::cout << fmt6(we.offset_seconds) << '\t' << fmt6(we.estimate.dimension) << '\t'
                  << fmt6(we.estimate.r_squared) << '\t' << we.estimate.points.size() << '\t'
                  << we.estimate.excluded_count << "\n";
    std::cout << "windows " << rec.window_estimates.size() << "\n";
    std::cout << "failed_windows " << rec.failed_window_offsets.size() << "\n";
    std::cout << "summary_max " << fmt6(*rec.summary_max) << "\n";
    std::cout << "summary_mean " << fmt6(*rec.summary_mean) << "\n";
    std::cout << "classification " << to_string(*rec.classification) << "\n";

    if (!args.plotdata.empty()) {
        std::string text = "# fracdim " + std::string(kVersion) + "\n# config " +
                           rec.config_fingerprint + "\n";
        bool first = true;
        for (const auto& we : rec.window_estimates) {
            if (!first) text += "\n";
            first = false;
            text += "# " + args.path + " offset=" + fmt6(we.offset_seconds) + "s\n";
            for (const auto& p : we.estimate.points)
                text += detail::format_g(std::log(p.scale)) + " " +
                        detail::format_g(std::log(p.measure)) + "\n";
        }
        write_text_file(args.plotdata, text);
        std::cerr << "wrote " << args.plotdata << "\n";
    }
    return 0;
}

struct BoxdimArgs {
    std::string set;
    std::string points_file;
    int level = -1;            // koch/carpet; -1 = per-set default
    std::size_t n = 0;         // square/segment; 0 = per-set default
    std::size_t grid = 0;      // julia sets; 0 = per-set default
    std::size_t max_iter = 200;
    double escape_radius = 2.0;
    double c_re = -0.123;
    double c_im = 0.745;
    std::string plotdata;
};

int cmd_boxdim(const BoxdimArgs& args) {
    PointSet2D set;
    std::string name;
    if (!args.points_file.empty()) {
        name = args.points_file;
        std::ifstream in(args.points_file);
        if (!in)
            throw std::invalid_argument(args.points_file + ": cannot open file");
        set = read_points_text(in);
        if (set.points.empty())
            throw std::invalid_argument(args.points_file + ": no points in file");
    } else if (args.set == "koch") {
        name = "koch";
        set = gen_koch(args.level < 0 ? 6 : args.level);
    } else if (args.set == "carpet") {
        name = "carpet";
        set = gen_sierpinski_carpet(args.level < 0 ? 5 : args.level);
    } else if (args.set == "square") {
        name = "square";
        set = gen_filled_square(args.n == 0 ? 512 : args.n);
    } else if (args.set == "segment") {
        name = "segment";
        set = gen_segment(args.n == 0 ? 1000 : args.n);
    } else if (args.set == "rabbit" || args.set == "circle" || args.set == "julia") {
        name = args.set;
        JuliaParams jp;
        if (args.set == "circle") {
            jp.c_re = 0.0;
            jp.c_im = 0.0;
            jp.grid_resolution = 512; // unit circle: coarser grids track the curve better
        } else {
            jp.c_re = args.c_re;
            jp.c_im = args.c_im;
            jp.grid_resolution = 1024;
        }
        if (args.grid != 0)
            jp.grid_resolution = args.grid;
        jp.max_iter = args.max_iter;
        jp.escape_radius = args.escape_radius;
        set = gen_julia_boundary(jp);
    } else {
        throw std::invalid_argument("unknown point set: " + args.set);
    }

    const DimensionEstimate est = box_dimension(set);
    std::cout << "# fracdim " << kVersion << "\n";
    std::cout << "set " << name << "\n";
    std::cout << "points " << set.points.size() << "\n";
    std::cout << "dimension " << fmt6(est.dimension) << "\n";
    std::cout << "slope " << fmt6(est.slope) << "\n";
    std::cout << "intercept " << fmt6(est.intercept) << "\n";
    std::cout << "r_squared " << fmt6(est.r_squared) << "\n";
    std::cout << "box_sizes " << est.points.size() << "\n";

    if (!args.plotdata.empty()) {
        std::string text = "# fracdim " + std::string(kVersion) + "\n# " + name + "\n";
        for (const auto& p : est.points)
            text += detail::format_g(std::log(p.scale)) + " " +
                    detail::format_g(std::log(p.measure)) + "\n";
        write_text_file(args.plotdata, text);
        std::cerr << "wrote " << args.plotdata << "\n";
    }
    return 0;
}

struct ValidateArgs {
    std::size_t k_max = 0;
};

int cmd_validate(const ValidateArgs& args) {
    struct Row {
        std::string name;
        double expected;
        double lo, hi;
        TimeSeries series;
    };

    std::vector<Row> rows;
    rows.push_back({"sine_440", 1.00, 0.90, 1.03, gen_sine(440.0, 44100.0, 2.0)});
    rows.push_back({"square_440", 1.00, 0.90, 1.05, gen_square(440.0, 44100.0, 2.0)});
    rows.push_back({"triangle_440", 1.00, 0.90, 1.05, gen_triangle(440.0, 44100.0, 2.0)});
    rows.push_back({"ramp_10000", 1.00, 1.0 - 1e-6, 1.0 + 1e-6, gen_ramp(10000)});
    rows.push_back({"weierstrass_1.33", 1.33, 1.26, 1.40,
                    gen_weierstrass(weierstrass_params_for_dimension(1.33, 5.0), 32768.0, 1.0)});
    for (double d : {1.2, 1.5, 1.8}) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "weierstrass_%.1f", d);
        rows.push_back({buf, d, d - 0.08, d + 0.08,
                        gen_weierstrass(weierstrass_params_for_dimension(d, 3.0), 32768.0, 1.0)});
    }
    rows.push_back({"noise_seed42", 2.00, 1.90, 2.05, gen_white_noise(42, 44100.0, 1.0)});

    HiguchiConfig cfg;
    cfg.k_max = args.k_max;
    const bool default_config = (args.k_max == 0);

    std::cout << "# fracdim " << kVersion << "\n";
    std::cout << "signal\texpected\tmeasured\tband\tr_squared\tstatus\n";
    std::size_t passed = 0, failed = 0;
    for (const auto& row : rows) {
        const DimensionEstimate est = higuchi_dimension(row.series, cfg);
        const bool ok = (est.dimension >= row.lo && est.dimension <= row.hi);
        const char* status = ok ? "pass" : (default_config ? "fail" : "expected-fail");
        if (ok)
            ++passed;
        else if (default_config)
            ++failed;
        std::cout << row.name << '\t' << fmt6(row.expected) << '\t' << fmt6(est.dimension)
                  << '\t' << '[' << fmt6(row.lo) << ", " << fmt6(row.hi) << ']' << '\t'
                  << fmt6(est.r_squared) << '\t' << status << "\n";
    }
    std::cout << "result " << (failed == 0 ? "pass" : "fail") << " (" << passed << "/"
              << rows.size() << ")\n";
    return failed == 0 ? 0 : 1;
}

struct CorpusArgs {
    std::string manifest;
    std::string csv_out;
    std::string json_out;
    std::string plotdata_out;
    std::string aggregate_tag;
    unsigned jobs = 0;
    double window = 2.0;
    double hop = 1.0;
    std::size_t k_max = 0;
};

int cmd_corpus(const CorpusArgs& args) {
    AnalysisConfig cfg;
    cfg.plan.window_seconds = args.window;
    cfg.plan.hop_seconds = args.hop;
    cfg.higuchi.k_max = args.k_max;

    const auto entries = load_manifest(args.manifest);
    const auto records = run_manifest(entries, cfg, args.jobs);

    std::size_t failed = 0;
    for (const auto& rec : records)
        if (rec.failed())
            ++failed;
    std::cerr << "# fracdim " << kVersion << ": analyzed " << records.size() << " track(s), "
              << failed << " failed, config " << config_fingerprint(cfg) << "\n";

    if (!args.csv_out.empty()) {
        std::ostringstream os;
        emit_csv(os, records);
        write_text_file(args.csv_out, os.str());
        std::cerr << "wrote " << args.csv_out << "\n";
    }
    if (!args.json_out.empty()) {
        std::ostringstream os;
        emit_json(os, records);
        write_text_file(args.json_out, os.str());
        std::cerr << "wrote " << args.json_out << "\n";
    }
    if (!args.plotdata_out.empty()) {
        std::ostringstream os;
        emit_plotdata(os, records);
        write_text_file(args.plotdata_out, os.str());
        std::cerr << "wrote " << args.plotdata_out << "\n";
    }
    if (!args.aggregate_tag.empty()) {
        const auto groups = aggregate_by_tag(records, args.aggregate_tag);
        std::cout << args.aggregate_tag << ",max_dimension,title\n";
        for (const auto& [value, agg] : groups)
            std::cout << detail::csv_escape(value) << ',' << fmt6(agg.max_dimension) << ','
                      << detail::csv_escape(agg.title) << "\n";
    } else if (args.csv_out.empty() && args.json_out.empty() && args.plotdata_out.empty()) {
        emit_csv(std::cout, records);
    }

    if (!records.empty() && failed == records.size())
        return 1;
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"fractal dimension toolkit: Higuchi waveform analysis and 2D box counting"};
    app.set_version_flag("--version", std::string("fracdim ") + kVersion);
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a reference signal as a WAV file");
    synth_cmd->add_option("kind", synth.kind, "sine|square|triangle|weierstrass|noise|ramp")
        ->required()
        ->check(CLI::IsMember({"sine", "square", "triangle", "weierstrass", "noise", "ramp"}));
    synth_cmd->add_option("--out", synth.out, "output WAV path")->required();
    synth_cmd->add_option("--freq", synth.freq, "tone frequency in Hz")->capture_default_str();
    synth_cmd->add_option("--sample-rate", synth.sample_rate, "sample rate in Hz")
        ->capture_default_str();
    synth_cmd->add_option("--duration", synth.duration, "duration in seconds")
        ->capture_default_str();
    synth_cmd->add_option("--amplitude", synth.amplitude, "peak amplitude in [0, 1]")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "noise RNG seed")->capture_default_str();
    synth_cmd->add_option("--a", synth.a, "weierstrass amplitude ratio (0 < a < 1)")
        ->capture_default_str();
    synth_cmd->add_option("--b", synth.b, "weierstrass frequency ratio (b > 1)")
        ->capture_default_str();
    synth_cmd->add_option("--n", synth.n, "ramp sample count")->capture_default_str();
    synth_cmd->add_option("--bit-depth", synth.depth, "8|16|24|32|f32")
        ->capture_default_str()
        ->check(CLI::IsMember({"8", "16", "24", "32", "f32"}));

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Higuchi analysis of one WAV file");
    analyze_cmd->add_option("file", analyze.path, "WAV file to analyze")->required();
    analyze_cmd->add_option("--window", analyze.window, "window length in seconds")
        ->capture_default_str();
    analyze_cmd->add_option("--hop", analyze.hop, "hop between windows in seconds")
        ->capture_default_str();
    analyze_cmd->add_option("--k-max", analyze.k_max,
                            "largest Higuchi scale (0 = auto: min((N-1)/2, 16))")
        ->capture_default_str();
    analyze_cmd->add_option("--plotdata", analyze.plotdata,
                            "write per-window ln-ln fit points to this file");

    BoxdimArgs boxdim;
    auto* boxdim_cmd = app.add_subcommand("boxdim", "box-counting dimension of a 2D point set");
    auto* set_opt =
        boxdim_cmd->add_option("set", boxdim.set, "koch|carpet|square|segment|rabbit|circle|julia")
            ->check(CLI::IsMember({"koch", "carpet", "square", "segment", "rabbit", "circle",
                                   "julia"}));
    auto* points_opt =
        boxdim_cmd->add_option("--points", boxdim.points_file, "read x,y pairs from this file");
    set_opt->excludes(points_opt);
    points_opt->excludes(set_opt);
    boxdim_cmd->add_option("--level", boxdim.level,
                           "construction depth (koch default 6, carpet default 5)");
    boxdim_cmd->add_option("--n", boxdim.n,
                           "lattice side for square (default 512) / point count for segment "
                           "(default 1000)");
    boxdim_cmd->add_option("--grid", boxdim.grid,
                           "julia grid resolution (default 1024; circle 512)");
    boxdim_cmd->add_option("--max-iter", boxdim.max_iter, "julia iteration cap")
        ->capture_default_str();
    boxdim_cmd->add_option("--escape-radius", boxdim.escape_radius, "julia escape radius")
        ->capture_default_str();
    boxdim_cmd->add_option("--c-re", boxdim.c_re, "julia parameter, real part")
        ->capture_default_str();
    boxdim_cmd->add_option("--c-im", boxdim.c_im, "julia parameter, imaginary part")
        ->capture_default_str();
    boxdim_cmd->add_option("--plotdata", boxdim.plotdata, "write ln-ln fit points to this file");

    ValidateArgs validate;
    auto* validate_cmd =
        app.add_subcommand("validate", "check the estimator against known-dimension signals");
    validate_cmd->add_option("--k-max", validate.k_max,
                             "largest Higuchi scale (0 = auto; non-default flags misses as "
                             "expected-fail)")
        ->capture_default_str();

    CorpusArgs corpus;
    auto* corpus_cmd = app.add_subcommand("corpus", "analyze a manifest of WAV tracks");
    corpus_cmd->add_option("manifest", corpus.manifest,
                           "manifest: one 'path<TAB>key=value...' line per track")
        ->required();
    corpus_cmd->add_option("--csv", corpus.csv_out, "write the CSV report to this file");
    corpus_cmd->add_option("--json", corpus.json_out, "write the JSON report to this file");
    corpus_cmd->add_option("--plotdata", corpus.plotdata_out,
                           "write per-track ln-ln fit points to this file");
    corpus_cmd->add_option("--aggregate", corpus.aggregate_tag,
                           "print per-value maxima for this tag");
    corpus_cmd->add_option("--jobs", corpus.jobs, "worker threads (0 = hardware)")
        ->capture_default_str();
    corpus_cmd->add_option("--window", corpus.window, "window length in seconds")
        ->capture_default_str();
    corpus_cmd->add_option("--hop", corpus.hop, "hop between windows in seconds")
        ->capture_default_str();
    corpus_cmd->add_option("--k-max", corpus.k_max, "largest Higuchi scale (0 = auto)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*synth_cmd) return cmd_synth(synth);
    if (*analyze_cmd) return cmd_analyze(analyze);
    if (*boxdim_cmd) {
        if (boxdim.set.empty() && boxdim.points_file.empty()) {
            std::cerr << "error: boxdim needs a set name or --points FILE\n";
            return 2;
        }
        return cmd_boxdim(boxdim);
    }
    if (*validate_cmd) return cmd_validate(validate);
    if (*corpus_cmd) return cmd_corpus(corpus);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fracdim::EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fracdim::AnalysisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fracdim::WavError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fracdim::ManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
