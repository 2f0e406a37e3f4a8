#pragma once

#include "rscs/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rscs::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadMagicError : IoError {
    using IoError::IoError;
};
struct TruncatedError : IoError {
    using IoError::IoError;
};
struct DimOverflowError : IoError {
    using IoError::IoError;
};

/// RSM1 container: magic "RSM1", u32le rows, cols, frames, then float32le
/// payload, frame-major, row-major within each frame. Writes are atomic
/// (temp file + rename).
void write_volume(const std::filesystem::path& path, const Volume& v);
Volume read_volume(const std::filesystem::path& path);

void write_movie(const std::filesystem::path& path, const Movie& movie);
/// The container stores only the payload shape; the caller supplies the
/// frame rate.
Movie read_movie(const std::filesystem::path& path, double rate_hz = 1000.0);

void write_psf(const std::filesystem::path& path, const Psf& psf);
Psf read_psf(const std::filesystem::path& path);

/// Measurements with a JSON sidecar `<path>.schedule.json` holding the
/// ShutterSchedule fields by name.
void write_measurements(const std::filesystem::path& path, const MeasurementSeq& seq);
MeasurementSeq read_measurements(const std::filesystem::path& path);

/// Simple table with a mandatory header row; floats are printed with nine
/// significant digits.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

std::string format_double(double v);

/// RFC-4180-style CSV (fields quoted only when needed), atomic write.
void write_csv(const std::filesystem::path& path, const Table& table);

/// Atomic small-file write helper (temp + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

} // namespace rscs::io
