#include "bssdim/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bssdim {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(double v, const char* spec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

TimeSeriesMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content_line = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');

        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }

        if (!numeric) {
            // one non-numeric first row is a header
            if (first_content_line) {
                first_content_line = false;
                width = fields.size();
                continue;
            }
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": non-numeric cell");
        }
        if (first_content_line) {
            first_content_line = false;
            width = fields.size();
        } else if (fields.size() != width) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": expected " + std::to_string(width) + " fields, got " +
                             std::to_string(fields.size()));
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty() || width == 0) {
        throw ParseError(path.string() + ": no numeric data");
    }
    if (rows.size() <= width) {
        throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                         ": need more rows than columns (got " +
                         std::to_string(rows.size()) + " x " + std::to_string(width) + ")");
    }

    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return TimeSeriesMatrix(std::move(values));
}

namespace {

struct WavData {
    std::uint32_t sample_rate = 0;
    Matrix samples;  // frames x channels, scaled to [-1, 1]
};

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

WavData read_wav_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>()};

    auto fail = [&](const std::string& why) -> WavData {
        throw UnsupportedFormat(path.string() + ": " + why);
    };

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        fail("not a RIFF/WAVE file");
    }

    std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t size = read_u32(hdr + 4);
        if (pos + 8 + size > bytes.size()) fail("truncated chunk");
        const unsigned char* payload = hdr + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16) fail("short fmt chunk");
            format = read_u16(payload);
            channels = read_u16(payload + 2);
            rate = read_u32(payload + 4);
            block_align = read_u16(payload + 12);
            bits = read_u16(payload + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = payload;
            data_size = size;
        }
        pos += 8 + size + (size & 1);  // chunks are word aligned
    }

    if (!have_fmt || data == nullptr) fail("missing fmt or data chunk");
    if (channels == 0 || block_align == 0) fail("invalid fmt chunk");

    const bool pcm16 = format == 1 && bits == 16;
    const bool float32 = format == 3 && bits == 32;
    if (!pcm16 && !float32) {
        fail("only 16-bit PCM and 32-bit float are supported (format " +
             std::to_string(format) + ", " + std::to_string(bits) + " bits)");
    }
    const std::uint32_t bytes_per_sample = bits / 8u;
    if (block_align != bytes_per_sample * channels) fail("inconsistent block alignment");

    const std::uint32_t frames = data_size / block_align;
    if (frames == 0) fail("empty data chunk");

    WavData wav;
    wav.sample_rate = rate;
    wav.samples.resize(frames, channels);
    for (std::uint32_t f = 0; f < frames; ++f) {
        const unsigned char* frame = data + static_cast<std::size_t>(f) * block_align;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* s = frame + c * bytes_per_sample;
            if (pcm16) {
                std::int16_t v;
                std::memcpy(&v, s, 2);
                wav.samples(f, c) = static_cast<double>(v) / 32768.0;
            } else {
                float v;
                std::memcpy(&v, s, 4);
                wav.samples(f, c) = static_cast<double>(v);
            }
        }
    }
    return wav;
}

}  // namespace

TimeSeriesMatrix read_wav(const std::vector<std::filesystem::path>& paths) {
    if (paths.empty()) throw InvalidInput("read_wav: no input files");

    std::vector<WavData> files;
    files.reserve(paths.size());
    for (const auto& p : paths) files.push_back(read_wav_file(p));

    const auto frames = files.front().samples.rows();
    const auto rate = files.front().sample_rate;
    Eigen::Index total_channels = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (files[i].samples.rows() != frames) {
            throw UnsupportedFormat(paths[i].string() + ": length differs from " +
                                    paths.front().string());
        }
        if (files[i].sample_rate != rate) {
            throw UnsupportedFormat(paths[i].string() + ": sample rate differs from " +
                                    paths.front().string());
        }
        total_channels += files[i].samples.cols();
    }

    Matrix values(frames, total_channels);
    Eigen::Index col = 0;
    for (const auto& f : files) {
        values.middleCols(col, f.samples.cols()) = f.samples;
        col += f.samples.cols();
    }
    return TimeSeriesMatrix(std::move(values));
}

void write_csv(const Matrix& values, std::ostream& os) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j > 0) os << ',';
            os << fmt17(values(i, j));
        }
        os << '\n';
    }
}

void write_csv(const Matrix& values, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(values, out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ReportFormat format_from_string(std::string_view name) {
    if (name == "tsv") return ReportFormat::Tsv;
    if (name == "json") return ReportFormat::Json;
    throw InvalidInput("unknown report format '" + std::string(name) + "'");
}

namespace {

json method_to_json(const MethodSpec& m) {
    return json{{"kind", m.name()}, {"lags", m.lags}};
}

json noise_test_to_json(const NoiseTest& t) {
    return json{{"type", "noise_test"},
                {"d", t.d},
                {"method", method_to_json(t.method)},
                {"strategy", to_string(t.strategy)},
                {"replicates", t.replicates},
                {"m_observed", t.m_observed},
                {"m_star", t.m_star},
                {"p_value", t.p_value},
                {"seed", t.seed},
                {"warnings", t.warnings}};
}

json estimate_to_json(const DimensionEstimate& e) {
    json trace = json::array();
    for (const auto& [d, pv] : e.trace) {
        trace.push_back(json{{"d", d}, {"p_value", pv}});
    }
    json tests = json::array();
    for (const NoiseTest& t : e.tests) tests.push_back(noise_test_to_json(t));
    return json{{"type", "dimension_estimate"},
                {"d_hat", e.d_hat},
                {"alpha", e.alpha},
                {"strategy_name", e.strategy_name},
                {"trace", trace},
                {"tests", tests}};
}

std::string hypothesis_label(int d) { return "h" + std::to_string(d); }

}  // namespace

std::string report_noise_test(const NoiseTest& t, ReportFormat f) {
    if (f == ReportFormat::Json) return noise_test_to_json(t).dump(2) + "\n";

    std::ostringstream os;
    os << "d\tmethod\tstrategy\tR\tm_observed\tp_value\twarnings\tseed\n";
    os << t.d << '\t' << t.method.name() << '\t' << to_string(t.strategy) << '\t'
       << t.replicates << '\t' << fmt17(t.m_observed) << '\t'
       << fmt(t.p_value, "%.6f") << '\t' << t.warnings << '\t' << t.seed << '\n';
    return os.str();
}

std::string report_estimate(const DimensionEstimate& e, ReportFormat f) {
    if (f == ReportFormat::Json) return estimate_to_json(e).dump(2) + "\n";

    std::ostringstream os;
    os << "# strategy\t" << e.strategy_name << '\n';
    os << "# alpha\t" << fmt(e.alpha, "%g") << '\n';
    os << "# d_hat\t" << e.d_hat << '\n';
    os << "d\tp_value\n";
    for (const auto& [d, pv] : e.trace) {
        os << d << '\t' << fmt(pv, "%.6f") << '\n';
    }
    return os.str();
}

std::string report_study(const StudyResult& s, ReportFormat f) {
    const StudyConfig& c = s.config;

    if (f == ReportFormat::Json) {
        json methods = json::array();
        for (const auto& m : c.methods) methods.push_back(method_to_json(m));
        json strategies = json::array();
        for (auto st : c.strategies) strategies.push_back(to_string(st));
        json cells = json::array();
        for (const StudyCell& cell : s.cells) {
            cells.push_back(json{{"setting", cell.setting},
                                 {"T", cell.length},
                                 {"method", c.methods[cell.method_index].name()},
                                 {"strategy", to_string(c.strategies[cell.strategy_index])},
                                 {"d", cell.d},
                                 {"rejections", cell.rejections},
                                 {"completed", cell.completed},
                                 {"aborted", cell.aborted},
                                 {"rate", cell.rate()},
                                 {"std_error", cell.std_error()}});
        }
        json config{{"settings", c.settings},
                    {"lengths", c.lengths},
                    {"methods", methods},
                    {"strategies", strategies},
                    {"replicates", c.replicates},
                    {"repetitions", c.repetitions},
                    {"alpha", c.alpha},
                    {"hypotheses", c.hypotheses},
                    {"seed", c.seed},
                    {"scale_t_noise", c.scale_t_noise}};
        return json{{"type", "study"}, {"config", config}, {"cells", cells}}.dump(2) + "\n";
    }

    // Table layout: one block of rows (T x strategy) per setting; columns are
    // method x hypothesis rates followed by their standard errors.
    std::ostringstream os;
    os << "setting\tT\tstrategy";
    for (const auto& m : c.methods) {
        for (int d : c.hypotheses) {
            os << '\t' << m.name() << '_' << hypothesis_label(d);
        }
    }
    for (const auto& m : c.methods) {
        for (int d : c.hypotheses) {
            os << '\t' << m.name() << '_' << hypothesis_label(d) << "_se";
        }
    }
    os << '\n';

    std::ostringstream aborted_notes;
    for (int setting : c.settings) {
        for (int length : c.lengths) {
            for (std::size_t si = 0; si < c.strategies.size(); ++si) {
                os << setting << '\t' << length << '\t' << to_string(c.strategies[si]);
                for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
                    for (int d : c.hypotheses) {
                        const StudyCell* cell = s.find(setting, length, mi, si, d);
                        os << '\t' << (cell ? fmt(cell->rate(), "%.3f") : "NA");
                        if (cell && cell->aborted > 0) {
                            aborted_notes << "# aborted\t" << setting << '\t' << length
                                          << '\t' << to_string(c.strategies[si]) << '\t'
                                          << c.methods[mi].name() << '_'
                                          << hypothesis_label(d) << '\t' << cell->aborted
                                          << '\n';
                        }
                    }
                }
                for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
                    for (int d : c.hypotheses) {
                        const StudyCell* cell = s.find(setting, length, mi, si, d);
                        os << '\t' << (cell ? fmt(cell->std_error(), "%.4f") : "NA");
                    }
                }
                os << '\n';
            }
        }
    }
    os << aborted_notes.str();
    return os.str();
}

std::string report_separation(const BssSolution& s, ReportFormat f) {
    if (f == ReportFormat::Json) {
        auto matrix_rows = [](const Matrix& m) {
            json rows = json::array();
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
                rows.push_back(std::move(row));
            }
            return rows;
        };
        std::vector<double> mean(s.whitening.mean.data(),
                                 s.whitening.mean.data() + s.whitening.mean.size());
        std::vector<double> diag(s.diagnostics.data(),
                                 s.diagnostics.data() + s.diagnostics.size());
        return json{{"type", "separation"},
                    {"lags", s.lags},
                    {"mean", mean},
                    {"diagnostics", diag},
                    {"lambda", matrix_rows(s.lambda)},
                    {"unmixing", matrix_rows(s.unmixing)},
                    {"rotation", matrix_rows(s.rotation.entries())}}
                   .dump(2) +
               "\n";
    }

    std::ostringstream os;
    os << "component\tdiagnostic";
    for (int lag : s.lags) os << "\tlambda_" << lag;
    os << '\n';
    for (Eigen::Index i = 0; i < s.diagnostics.size(); ++i) {
        os << (i + 1) << '\t' << fmt17(s.diagnostics(i));
        for (Eigen::Index k = 0; k < s.lambda.cols(); ++k) {
            os << '\t' << fmt17(s.lambda(i, k));
        }
        os << '\n';
    }
    return os.str();
}

std::string report_sound(const SoundExperimentResult& s, ReportFormat f) {
    const std::vector<BootstrapStrategy> strategies{
        BootstrapStrategy::Parametric, BootstrapStrategy::NonparPooled,
        BootstrapStrategy::NonparComponentwise, BootstrapStrategy::NonparJointRows};

    if (f == ReportFormat::Json) {
        json combos = json::array();
        for (const SoundCombo& combo : s.combos) {
            combos.push_back(json{{"strategy", to_string(combo.strategy)},
                                  {"method", combo.method.name()},
                                  {"forward", estimate_to_json(combo.forward)},
                                  {"backward", estimate_to_json(combo.backward)}});
        }
        return json{{"type", "sound_experiment"},
                    {"signal_dim", s.signal_dim},
                    {"noise_channels", s.noise_channels},
                    {"combos", combos}}
                   .dump(2) +
               "\n";
    }

    auto find = [&](BootstrapStrategy st, std::string_view method) -> const SoundCombo* {
        for (const SoundCombo& combo : s.combos) {
            if (combo.strategy == st && combo.method.name() == method) return &combo;
        }
        return nullptr;
    };

    std::ostringstream os;
    os << "estimator\tmethod";
    for (auto st : strategies) os << '\t' << to_string(st);
    os << '\n';
    for (const char* estimator : {"forwards", "backwards"}) {
        for (const char* method : {"amuse", "sobi"}) {
            os << estimator << '\t' << method;
            for (auto st : strategies) {
                const SoundCombo* combo = find(st, method);
                if (!combo) {
                    os << "\tNA";
                } else {
                    os << '\t'
                       << (std::string_view(estimator) == "forwards"
                               ? combo->forward.d_hat
                               : combo->backward.d_hat);
                }
            }
            os << '\n';
        }
    }
    return os.str();
}

void write_report(const std::string& content, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<int> parse_lag_list(const std::string& text) {
    auto parse_int = [&](std::string_view s) -> int {
        s = trim(s);
        int v = 0;
        const char* begin = s.data();
        const char* end = begin + s.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end) {
            throw ParseError("invalid integer '" + std::string(s) + "' in lag list");
        }
        return v;
    };

    std::string_view sv = trim(text);
    if (sv.empty()) throw ParseError("empty lag list");

    std::size_t range = sv.find("..");
    if (range != std::string_view::npos) {
        int lo = parse_int(sv.substr(0, range));
        int hi = parse_int(sv.substr(range + 2));
        if (hi < lo) throw ParseError("descending lag range '" + std::string(sv) + "'");
        std::vector<int> lags;
        for (int v = lo; v <= hi; ++v) lags.push_back(v);
        return lags;
    }

    std::vector<int> lags;
    for (std::string_view field : split(sv, ',')) lags.push_back(parse_int(field));
    return lags;
}

namespace {

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> items;
    for (std::string_view field : split(value, ',')) {
        field = trim(field);
        if (!field.empty()) items.emplace_back(field);
    }
    return items;
}

int to_int(std::string_view s, const std::string& context) {
    int v = 0;
    s = trim(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(context + ": invalid integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

StudyConfig parse_study_config(std::istream& is, const std::string& name) {
    StudyConfig config;
    int amuse_lag = 1;
    std::vector<int> sobi_lags = default_sobi_lags();
    std::vector<std::string> method_names{"amuse", "sobi"};
    bool methods_set = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const std::string context = name + ": line " + std::to_string(line_no);

        std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(context + ": expected key = value");
        }
        std::string key{trim(sv.substr(0, eq))};
        std::string value{trim(sv.substr(eq + 1))};

        if (key == "settings") {
            config.settings.clear();
            for (const auto& s : parse_list(value)) config.settings.push_back(to_int(s, context));
        } else if (key == "T" || key == "lengths") {
            config.lengths.clear();
            for (const auto& s : parse_list(value)) config.lengths.push_back(to_int(s, context));
        } else if (key == "methods") {
            method_names = parse_list(value);
            methods_set = true;
        } else if (key == "amuse_lag") {
            amuse_lag = to_int(value, context);
        } else if (key == "sobi_lags") {
            sobi_lags = parse_lag_list(value);
        } else if (key == "strategies") {
            config.strategies.clear();
            for (const auto& s : parse_list(value)) {
                config.strategies.push_back(strategy_from_string(s));
            }
        } else if (key == "R" || key == "replicates") {
            config.replicates = to_int(value, context);
        } else if (key == "repetitions") {
            config.repetitions = to_int(value, context);
        } else if (key == "alpha") {
            double a = 0.0;
            if (!parse_double(value, a)) {
                throw ParseError(context + ": invalid alpha '" + value + "'");
            }
            config.alpha = a;
        } else if (key == "hypotheses") {
            config.hypotheses.clear();
            for (const auto& s : parse_list(value)) config.hypotheses.push_back(to_int(s, context));
        } else if (key == "seed") {
            std::uint64_t seed = 0;
            std::string_view s = trim(value);
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw ParseError(context + ": invalid seed '" + value + "'");
            }
            config.seed = seed;
        } else if (key == "threads") {
            config.threads = to_int(value, context);
        } else if (key == "scale_t_noise") {
            if (value == "true" || value == "1") {
                config.scale_t_noise = true;
            } else if (value == "false" || value == "0") {
                config.scale_t_noise = false;
            } else {
                throw ParseError(context + ": expected true/false, got '" + value + "'");
            }
        } else {
            throw ParseError(context + ": unknown key '" + key + "'");
        }
    }

    config.methods.clear();
    for (const auto& m : method_names) {
        if (m == "amuse") {
            config.methods.push_back(MethodSpec::amuse(amuse_lag));
        } else if (m == "sobi") {
            config.methods.push_back(MethodSpec::sobi(sobi_lags));
        } else {
            throw ParseError(name + ": unknown method '" + m + "'");
        }
    }
    if (!methods_set && config.methods.empty()) {
        throw ParseError(name + ": no methods configured");
    }
    return config;
}

StudyConfig read_study_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_study_config(in, path.string());
}

}  // namespace bssdim
