#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

#include "fracdim/errors.hpp"
#include "fracdim/higuchi.hpp"
#include "fracdim/time_series.hpp"
#include "fracdim/wav.hpp"
#include "fracdim/windowing.hpp"

namespace fracdim {

enum class Classification {
    least_fractal,
    moderately_fractal,
    highly_fractal,
};

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::least_fractal: return "LeastFractal";
        case Classification::moderately_fractal: return "ModeratelyFractal";
        case Classification::highly_fractal: return "HighlyFractal";
    }
    return "unknown";
}

inline Classification classification_from_string(std::string_view s) {
    if (s == "LeastFractal") return Classification::least_fractal;
    if (s == "ModeratelyFractal") return Classification::moderately_fractal;
    if (s == "HighlyFractal") return Classification::highly_fractal;
    throw std::invalid_argument("unknown classification: " + std::string(s));
}

// Bands are defined on the dimension rounded half-up to hundredths:
// <= 1.02 least, 1.03..1.08 moderate, >= 1.09 high.
inline Classification classify(double dimension) {
    if (!std::isfinite(dimension))
        throw std::invalid_argument("dimension must be finite");
    const long long h = std::llround(dimension * 100.0);
    if (h <= 102) return Classification::least_fractal;
    if (h <= 108) return Classification::moderately_fractal;
    return Classification::highly_fractal;
}

struct TrackEntry {
    std::string path;
    std::string title; // title= tag when present, else the filename stem
    std::map<std::string, std::string> tags;

    bool operator==(const TrackEntry&) const = default;
};

struct WindowEstimate {
    double offset_seconds = 0.0;
    DimensionEstimate estimate;

    bool operator==(const WindowEstimate&) const = default;
};

struct TrackRecord {
    TrackEntry entry;
    std::vector<WindowEstimate> window_estimates;
    std::vector<double> failed_window_offsets; // windows skipped as degenerate
    std::optional<double> summary_max;
    std::optional<double> summary_mean;
    std::optional<Classification> classification; // classify(summary_max)
    std::string config_fingerprint;
    std::string error; // empty for successful analysis

    bool failed() const { return !error.empty(); }

    bool operator==(const TrackRecord&) const = default;
};

struct AnalysisConfig {
    WindowPlan plan{};
    HiguchiConfig higuchi{};
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string format_g(double v, int precision = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

inline std::string format_fixed(double v, int places = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

} // namespace detail

// Stable digest of every analysis parameter, stamped into each record and
// report so runs are comparable at a glance.
inline std::string config_fingerprint(const AnalysisConfig& cfg) {
    std::string canon = "window=" + detail::format_g(cfg.plan.window_seconds, 17) +
                        ";hop=" + detail::format_g(cfg.plan.hop_seconds, 17) +
                        ";k_max=" + std::to_string(cfg.higuchi.k_max) + ";schedule=";
    for (std::size_t k : cfg.higuchi.k_schedule)
        canon += std::to_string(k) + ",";
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(canon)));
    return buf;
}

// Windowed Higuchi analysis of a decoded clip. Degenerate windows are
// recorded by offset and skipped; a clip with no analyzable window at all
// raises AnalysisError. The returned record has no entry attached.
inline TrackRecord analyze_clip(const AudioClip& clip, const AnalysisConfig& cfg) {
    TrackRecord rec;
    rec.config_fingerprint = config_fingerprint(cfg);

    const TimeSeries mono = to_mono(clip);
    // Plan problems are contract violations and propagate as-is; data
    // problems (short or non-finite signal) are analysis failures.
    const std::size_t w = window_samples_for(cfg.plan, mono.sample_rate);
    (void)hop_samples_for(cfg.plan, mono.sample_rate);
    try {
        validate_series(mono);
    } catch (const std::invalid_argument& e) {
        throw AnalysisError(e.what());
    }
    if (mono.samples.size() < w)
        throw AnalysisError("clip is shorter than one analysis window");

    for (const auto& win : segment(mono, cfg.plan)) {
        try {
            rec.window_estimates.push_back(
                {win.offset_seconds, higuchi_dimension(win.series, cfg.higuchi)});
        } catch (const EstimationError&) {
            rec.failed_window_offsets.push_back(win.offset_seconds);
        }
    }
    if (rec.window_estimates.empty())
        throw AnalysisError("no analyzable windows: every window was degenerate");

    double max_d = rec.window_estimates[0].estimate.dimension;
    double sum_d = 0.0;
    for (const auto& we : rec.window_estimates) {
        max_d = std::max(max_d, we.estimate.dimension);
        sum_d += we.estimate.dimension;
    }
    rec.summary_max = max_d;
    rec.summary_mean = sum_d / static_cast<double>(rec.window_estimates.size());
    rec.classification = classify(max_d);
    return rec;
}

// Loads, decodes, and analyzes one manifest entry. All failures carry the
// path for context.
inline TrackRecord analyze_track(const TrackEntry& entry, const AnalysisConfig& cfg) {
    std::ifstream in(entry.path, std::ios::binary);
    if (!in)
        throw AnalysisError(entry.path + ": cannot open file");
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    if (size < 0)
        throw AnalysisError(entry.path + ": cannot read file");
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
        throw AnalysisError(entry.path + ": cannot read file");

    try {
        TrackRecord rec = analyze_clip(parse_wav(bytes), cfg);
        rec.entry = entry;
        return rec;
    } catch (const WavError& e) {
        throw AnalysisError(entry.path + ": " + e.what());
    } catch (const AnalysisError& e) {
        throw AnalysisError(entry.path + ": " + e.what());
    }
}

// Analyzes every entry, farming tracks out to `jobs` worker threads
// (0 = hardware concurrency). Failures are recorded on the affected
// track, never aborting the batch, and the output order is the manifest
// order regardless of scheduling.
inline std::vector<TrackRecord> run_manifest(const std::vector<TrackEntry>& entries,
                                             const AnalysisConfig& cfg,
                                             unsigned jobs = 0) {
    if (jobs > 256)
        throw std::invalid_argument("jobs must be at most 256");
    std::vector<TrackRecord> results(entries.size());
    if (entries.empty())
        return results;

    auto run_one = [&](std::size_t i) {
        try {
            results[i] = analyze_track(entries[i], cfg);
        } catch (const std::exception& e) {
            TrackRecord rec;
            rec.entry = entries[i];
            rec.config_fingerprint = config_fingerprint(cfg);
            rec.error = e.what();
            results[i] = rec;
        }
    };

    unsigned n_threads = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, entries.size()));

    if (n_threads <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i)
            run_one(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= entries.size()) break;
                run_one(i);
            }
        });
    for (auto& th : pool)
        th.join();
    return results;
}

// Manifest format: one track per line, tab-separated; first field is the
// WAV path, remaining fields are key=value tags. Blank lines and lines
// starting with '#' are skipped.
inline std::vector<TrackEntry> parse_manifest(std::istream& in) {
    std::vector<TrackEntry> entries;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;

        TrackEntry entry;
        std::size_t begin = 0;
        bool have_path = false;
        while (begin <= line.size()) {
            std::size_t end = line.find('\t', begin);
            if (end == std::string::npos) end = line.size();
            std::string field = line.substr(begin, end - begin);
            begin = end + 1;
            while (!field.empty() && field.front() == ' ') field.erase(field.begin());
            while (!field.empty() && field.back() == ' ') field.pop_back();
            if (field.empty()) {
                if (begin > line.size()) break;
                continue;
            }
            if (!have_path) {
                entry.path = field;
                have_path = true;
            } else {
                const std::size_t eq = field.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw ManifestError("line " + std::to_string(line_no) +
                                        ": tag field '" + field + "' is not key=value");
                entry.tags[field.substr(0, eq)] = field.substr(eq + 1);
            }
            if (begin > line.size()) break;
        }
        if (!have_path)
            throw ManifestError("line " + std::to_string(line_no) + ": no path field");
        if (auto it = seen.find(entry.path); it != seen.end())
            throw ManifestError("line " + std::to_string(line_no) + ": duplicate path '" +
                                entry.path + "' (first on line " +
                                std::to_string(it->second) + ")");
        seen[entry.path] = line_no;

        if (auto it = entry.tags.find("title"); it != entry.tags.end())
            entry.title = it->second;
        else
            entry.title = std::filesystem::path(entry.path).stem().string();
        entries.push_back(std::move(entry));
    }
    return entries;
}

inline std::vector<TrackEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ManifestError(path + ": cannot open manifest");
    return parse_manifest(in);
}

struct TagAggregate {
    double max_dimension = 0.0;
    std::string title; // track that attains the maximum

    bool operator==(const TagAggregate&) const = default;
};

// Groups successful records by the value of one tag ("untagged" when a
// record lacks it) and keeps each group's maximum summary dimension. The
// tag must appear on at least one record.
inline std::map<std::string, TagAggregate> aggregate_by_tag(
    std::span<const TrackRecord> records, const std::string& tag_key) {
    if (records.empty())
        throw std::invalid_argument("no records to aggregate");
    bool key_seen = false;
    for (const auto& rec : records)
        if (rec.entry.tags.count(tag_key)) {
            key_seen = true;
            break;
        }
    if (!key_seen)
        throw std::invalid_argument("tag '" + tag_key + "' is absent from every record");

    std::map<std::string, TagAggregate> out;
    for (const auto& rec : records) {
        if (rec.failed())
            continue;
        const auto it = rec.entry.tags.find(tag_key);
        const std::string value = (it != rec.entry.tags.end()) ? it->second : "untagged";
        const double d = *rec.summary_max;
        auto [slot, inserted] = out.try_emplace(value, TagAggregate{d, rec.entry.title});
        if (!inserted && d > slot->second.max_dimension)
            slot->second = TagAggregate{d, rec.entry.title};
    }
    return out;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string tags_field(const std::map<std::string, std::string>& tags) {
    std::string out;
    for (const auto& [k, v] : tags) {
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

} // namespace detail

// CSV report: one row per track. Failed tracks leave the summary and
// classification fields empty; the full error text lives in the JSON
// report.
inline void emit_csv(std::ostream& out, std::span<const TrackRecord> records) {
    out << "title,path,tags,summary_max,summary_mean,classification,"
           "window_count,failed_windows,config_fingerprint\n";
    for (const auto& rec : records) {
        out << detail::csv_escape(rec.entry.title) << ','
            << detail::csv_escape(rec.entry.path) << ','
            << detail::csv_escape(detail::tags_field(rec.entry.tags)) << ',';
        if (rec.summary_max) out << detail::format_fixed(*rec.summary_max);
        out << ',';
        if (rec.summary_mean) out << detail::format_fixed(*rec.summary_mean);
        out << ',';
        if (rec.classification) out << to_string(*rec.classification);
        out << ',' << rec.window_estimates.size() << ','
            << rec.failed_window_offsets.size() << ',' << rec.config_fingerprint << '\n';
    }
}

inline nlohmann::json to_json(const DimensionEstimate& est) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : est.points)
        points.push_back({{"scale", p.scale}, {"measure", p.measure}});
    return {{"dimension", est.dimension},
            {"slope", est.slope},
            {"intercept", est.intercept},
            {"r_squared", est.r_squared},
            {"points", std::move(points)},
            {"excluded_count", est.excluded_count}};
}

inline nlohmann::json to_json(const TrackRecord& rec) {
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& we : rec.window_estimates) {
        nlohmann::json w = to_json(we.estimate);
        w["offset_seconds"] = we.offset_seconds;
        windows.push_back(std::move(w));
    }
    nlohmann::json j;
    j["title"] = rec.entry.title;
    j["path"] = rec.entry.path;
    j["tags"] = rec.entry.tags;
    j["window_estimates"] = std::move(windows);
    j["failed_window_offsets"] = rec.failed_window_offsets;
    j["summary_max"] = rec.summary_max ? nlohmann::json(*rec.summary_max) : nlohmann::json();
    j["summary_mean"] = rec.summary_mean ? nlohmann::json(*rec.summary_mean) : nlohmann::json();
    j["classification"] =
        rec.classification ? nlohmann::json(to_string(*rec.classification)) : nlohmann::json();
    j["config_fingerprint"] = rec.config_fingerprint;
    j["error"] = rec.error;
    return j;
}

// JSON report: mirrors TrackRecord losslessly, per-window fit points
// included, so parse_json_records can reconstruct the records exactly.
inline void emit_json(std::ostream& out, std::span<const TrackRecord> records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records)
        arr.push_back(to_json(rec));
    nlohmann::json root;
    root["records"] = std::move(arr);
    out << root.dump(2) << '\n';
}

inline std::vector<TrackRecord> parse_json_records(std::istream& in) {
    try {
        const nlohmann::json root = nlohmann::json::parse(in);
        std::vector<TrackRecord> records;
        for (const auto& j : root.at("records")) {
            TrackRecord rec;
            rec.entry.title = j.at("title").get<std::string>();
            rec.entry.path = j.at("path").get<std::string>();
            rec.entry.tags = j.at("tags").get<std::map<std::string, std::string>>();
            for (const auto& w : j.at("window_estimates")) {
                WindowEstimate we;
                we.offset_seconds = w.at("offset_seconds").get<double>();
                we.estimate.dimension = w.at("dimension").get<double>();
                we.estimate.slope = w.at("slope").get<double>();
                we.estimate.intercept = w.at("intercept").get<double>();
                we.estimate.r_squared = w.at("r_squared").get<double>();
                we.estimate.excluded_count = w.at("excluded_count").get<std::size_t>();
                for (const auto& p : w.at("points"))
                    we.estimate.points.push_back(
                        {p.at("scale").get<double>(), p.at("measure").get<double>()});
                rec.window_estimates.push_back(std::move(we));
            }
            rec.failed_window_offsets =
                j.at("failed_window_offsets").get<std::vector<double>>();
            if (!j.at("summary_max").is_null())
                rec.summary_max = j.at("summary_max").get<double>();
            if (!j.at("summary_mean").is_null())
                rec.summary_mean = j.at("summary_mean").get<double>();
            if (!j.at("classification").is_null())
                rec.classification =
                    classification_from_string(j.at("classification").get<std::string>());
            rec.config_fingerprint = j.at("config_fingerprint").get<std::string>();
            rec.error = j.at("error").get<std::string>();
            records.push_back(std::move(rec));
        }
        return records;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed records JSON: ") + e.what());
    }
}

// Plot-ready text: one block per successful track, "# title" header, then
// "ln_scale ln_measure" pairs from the window with the largest dimension
// (the one that drives classification). Blocks are blank-line separated.
inline void emit_plotdata(std::ostream& out, std::span<const TrackRecord> records) {
    if (records.empty())
        throw std::invalid_argument("no records for plotdata");
    bool first = true;
    for (const auto& rec : records) {
        if (rec.failed() || rec.window_estimates.empty())
            continue;
        const WindowEstimate* best = &rec.window_estimates[0];
        for (const auto& we : rec.window_estimates)
            if (we.estimate.dimension > best->estimate.dimension)
                best = &we;
        if (!first) out << '\n';
        first = false;
        out << "# " << rec.entry.title << '\n';
        for (const auto& p : best->estimate.points)
            out << detail::format_g(std::log(p.scale)) << ' '
                << detail::format_g(std::log(p.measure)) << '\n';
    }
}

enum class ReportFormat { csv, json, plotdata };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "plotdata") return ReportFormat::plotdata;
    throw std::invalid_argument("unknown report format: " + s);
}

inline void emit_report(std::ostream& out, std::span<const TrackRecord> records,
                        ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: emit_csv(out, records); break;
        case ReportFormat::json: emit_json(out, records); break;
        case ReportFormat::plotdata: emit_plotdata(out, records); break;
    }
}

} // namespace fracdim
