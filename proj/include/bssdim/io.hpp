#pragma once

#include <filesystem>
#include <iosfwd>

#include "bssdim/simulate.hpp"

namespace bssdim {

// Reads a rectangular comma-separated numeric table; rows are time points.
// A single non-numeric first row is treated as a header and skipped.
// Ragged rows, non-numeric cells and T <= p raise ParseError naming the line.
TimeSeriesMatrix read_csv(const std::filesystem::path& path);

// Reads one multichannel WAV or several WAV files of equal sample rate and
// length (each file contributes its channels as columns). Supports 16-bit
// integer PCM (divided by 32768) and 32-bit float; anything else raises
// UnsupportedFormat.
TimeSeriesMatrix read_wav(const std::vector<std::filesystem::path>& paths);

// Writes values as CSV with round-trip precision (17 significant digits).
void write_csv(const Matrix& values, std::ostream& os);
void write_csv(const Matrix& values, const std::filesystem::path& path);

enum class ReportFormat { Tsv, Json };

ReportFormat format_from_string(std::string_view name);

// Report renderers. The JSON variants carry every field of the result,
// including seeds, replicate statistics and the full p-value trace, enough
// to re-verify the p-value arithmetic offline. The study TSV mirrors the
// rejection-rate tables: rows T x strategy, columns method x hypothesis.
std::string report_noise_test(const NoiseTest& t, ReportFormat f);
std::string report_estimate(const DimensionEstimate& e, ReportFormat f);
std::string report_study(const StudyResult& s, ReportFormat f);
std::string report_separation(const BssSolution& s, ReportFormat f);
std::string report_sound(const SoundExperimentResult& s, ReportFormat f);

// Writes pre-rendered report text; IoError when the path cannot be written.
void write_report(const std::string& content, const std::filesystem::path& path);

// Plain-text key = value study configuration (comma lists, `lo..hi` lag
// ranges, # comments). Unknown keys raise ParseError.
StudyConfig read_study_config(const std::filesystem::path& path);
StudyConfig parse_study_config(std::istream& is, const std::string& name);

// Lag list syntax used by the CLI and config files: "1..12" or "1,3,5".
std::vector<int> parse_lag_list(const std::string& text);

}  // namespace bssdim
