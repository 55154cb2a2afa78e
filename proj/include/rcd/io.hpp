#ifndef RCD_IO_HPP
#define RCD_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcd/detect.hpp"
#include "rcd/types.hpp"

namespace rcd::io {

inline constexpr const char* kCsvSchemaVersion = "rcd-csv v1";

// Dataset CSV: one column per trial; values printed with %.17g so a
// roundtrip is exact. Metadata rides in the schema comment line.
void write_dataset_csv(std::ostream& out, const MultiTrialDataset& data);
MultiTrialDataset read_dataset_csv(std::istream& in);

void write_spectrum_csv(std::ostream& out, const Spectrum& s);
void write_spectrogram_csv(std::ostream& out, const Spectrogram& sg);

// Compact binary dump for test goldens: magic "SPG1", little-endian uint64
// rows and cols, then row-major 64-bit floats.
void write_spg1(std::ostream& out, const std::vector<double>& values, std::uint64_t rows,
                std::uint64_t cols);
std::vector<double> read_spg1(std::istream& in, std::uint64_t& rows, std::uint64_t& cols);

// Diagram CSV: one row per point (dim, birth, death).
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d);
PersistenceDiagram read_diagram_csv(std::istream& in);

// Boundary CSV: one row per boundary r with D_r and C_r per metric plus an
// alarm flag per metric.
void write_boundary_csv(std::ostream& out, const detect::Report& report);

std::string report_to_json(const detect::Report& report);

// FNV-1a 64 of a file's bytes, hex-encoded; used for manifest content hashes.
std::string file_hash(const std::filesystem::path& path);

// Write-temp-then-rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace rcd::io

#endif  // RCD_IO_HPP
