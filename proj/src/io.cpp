#include "rscs/io.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace rscs::io {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'R', 'S', 'M', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32le(std::string& out, float v) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    put_u32le(out, bits);
}

float get_f32le(const unsigned char* p) {
    const std::uint32_t bits = get_u32le(p);
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_volume(const std::filesystem::path& path, const Volume& v) {
    std::string bytes;
    bytes.reserve(16 + v.size() * 4);
    bytes.append(kMagic, 4);
    put_u32le(bytes, static_cast<std::uint32_t>(v.rows()));
    put_u32le(bytes, static_cast<std::uint32_t>(v.cols()));
    put_u32le(bytes, static_cast<std::uint32_t>(v.frames()));
    const double* d = v.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        put_f32le(bytes, static_cast<float>(d[i]));
    }
    write_text_atomic(path, bytes);
}

Volume read_volume(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 16) throw TruncatedError("file shorter than header: " + path.string());
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagicError("bad magic in " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t rows = get_u32le(p + 4);
    const std::uint32_t cols = get_u32le(p + 8);
    const std::uint32_t frames = get_u32le(p + 12);
    if (rows < 1 || cols < 1 || frames < 1) {
        throw DimOverflowError("zero dimension in " + path.string());
    }
    // Stepwise so the element count cannot wrap around u64.
    constexpr std::uint64_t kMaxElems = std::uint64_t(1) << 32;
    const std::uint64_t plane = std::uint64_t(rows) * cols; // fits: both < 2^32
    if (plane > kMaxElems || plane * frames > kMaxElems ||
        rows > std::uint64_t(std::numeric_limits<int>::max()) ||
        cols > std::uint64_t(std::numeric_limits<int>::max()) ||
        frames > std::uint64_t(std::numeric_limits<int>::max())) {
        throw DimOverflowError("dimensions overflow in " + path.string());
    }
    const std::uint64_t elems = plane * frames;
    if (bytes.size() != 16 + elems * 4) {
        throw TruncatedError("payload length mismatch in " + path.string());
    }
    Volume v(static_cast<int>(rows), static_cast<int>(cols), static_cast<int>(frames));
    double* d = v.data();
    for (std::uint64_t i = 0; i < elems; ++i) {
        d[i] = static_cast<double>(get_f32le(p + 16 + i * 4));
    }
    return v;
}

void write_movie(const std::filesystem::path& path, const Movie& movie) {
    write_volume(path, movie.data);
}

Movie read_movie(const std::filesystem::path& path, double rate_hz) {
    Volume v = read_volume(path);
    if (v.rows() != v.cols()) throw IoError("movie frames must be square: " + path.string());
    Movie movie;
    movie.data = std::move(v);
    movie.dt = 1.0 / rate_hz;
    return movie;
}

void write_psf(const std::filesystem::path& path, const Psf& psf) {
    Volume v(psf.n(), psf.n(), 1);
    v.frame(0) = psf.kernel();
    write_volume(path, v);
}

Psf read_psf(const std::filesystem::path& path) {
    Volume v = read_volume(path);
    if (v.rows() != v.cols() || v.frames() != 1) {
        throw IoError("psf file must hold one square frame: " + path.string());
    }
    Frame kernel = v.frame(0);
    return Psf(kernel);
}

void write_measurements(const std::filesystem::path& path, const MeasurementSeq& seq) {
    write_volume(path, seq.data);
    json sidecar = {{"n", seq.schedule.n},
                    {"lines_per_sample", seq.schedule.lines_per_sample},
                    {"num_shutters", seq.schedule.num_shutters},
                    {"shutter_gap", seq.schedule.shutter_gap},
                    {"phase_offset", seq.schedule.phase_offset},
                    {"rate_hz", seq.schedule.rate_hz}};
    write_text_atomic(path.string() + ".schedule.json", sidecar.dump(2) + "\n");
}

MeasurementSeq read_measurements(const std::filesystem::path& path) {
    const std::filesystem::path sidecar_path = path.string() + ".schedule.json";
    if (!std::filesystem::exists(sidecar_path)) {
        throw IoError("missing schedule sidecar " + sidecar_path.string());
    }
    json sidecar = json::parse(read_file(sidecar_path));
    MeasurementSeq seq;
    seq.schedule.n = sidecar.at("n").get<int>();
    seq.schedule.lines_per_sample = sidecar.at("lines_per_sample").get<int>();
    seq.schedule.num_shutters = sidecar.at("num_shutters").get<int>();
    seq.schedule.shutter_gap = sidecar.at("shutter_gap").get<int>();
    seq.schedule.phase_offset = sidecar.at("phase_offset").get<int>();
    seq.schedule.rate_hz = sidecar.at("rate_hz").get<double>();
    seq.schedule.validate();
    seq.data = read_volume(path);
    if (seq.data.rows() != seq.schedule.lines_total() ||
        seq.data.cols() != seq.schedule.n) {
        throw IoError("measurement shape does not match schedule: " + path.string());
    }
    return seq;
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("Table: row width does not match header");
    }
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const Table& table) {
    if (table.columns.empty()) throw std::invalid_argument("write_csv: header required");
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(table.columns[i]);
    }
    out += "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += "\r\n";
    }
    write_text_atomic(path, out);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace rscs::io
