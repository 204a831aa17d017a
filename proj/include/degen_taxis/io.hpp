#pragma once

#include "degen_taxis/diagnostics.hpp"
#include "degen_taxis/invariants.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace degen_taxis
{

/// Series file: `# key = value` context lines, one header row naming the
/// DiagRecord columns, then one row per sample in %.16e (17 significant digits).
void write_series_csv(std::ostream& os, const std::vector<DiagRecord>& samples,
                      const std::vector<double>& p_list, const SeriesContext& ctx);
void write_series_csv(const std::filesystem::path& path, const std::vector<DiagRecord>& samples,
                      const std::vector<double>& p_list, const SeriesContext& ctx);

struct SeriesFile
{
    SeriesContext context;
    std::vector<std::string> columns;
    std::vector<DiagRecord> samples;
};

SeriesFile read_series_csv(std::istream& is);
SeriesFile read_series_csv(const std::filesystem::path& path);

/// Binary PGM (P5), 16-bit big-endian, first row = lowest y. Values map
/// linearly from [min, max] to [0, 65535]; a constant field maps to 0.
std::string encode_pgm16(const ScalarField& f);

struct SnapshotMeta
{
    double t = 0;
    std::string field;
    double min = 0;
    double max = 0;
};

/// Writes <stem>.pgm and the <stem>.json sidecar (t, field, min, max, grid).
void write_snapshot(const std::filesystem::path& stem, const ScalarField& f,
                    const SnapshotMeta& meta);

/// Decodes a PGM written by encode_pgm16 back to values using the sidecar range.
ScalarField decode_pgm16(const std::string& bytes, const GridSpec& grid, double min, double max);

std::string format_double(double x);

} // namespace degen_taxis
