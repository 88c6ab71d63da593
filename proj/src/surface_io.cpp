#include "amerop/surface_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "amerop/errors.hpp"

namespace amerop {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

std::string surface_to_csv(const PriceSurface& surface) {
    const GridSpec& g = surface.grid;
    std::ostringstream os;
    os << 'x';
    for (int n = 0; n <= g.n_time; ++n) os << ',' << format_double(g.time(n));
    os << '\n';
    for (int j = 0; j < g.n_space; ++j) {
        os << format_double(g.price(j));
        for (int n = 0; n <= g.n_time; ++n) os << ',' << format_double(surface.values(n, j));
        os << '\n';
    }
    return os.str();
}

void write_surface_csv(const std::filesystem::path& path, const PriceSurface& surface) {
    write_text(path, surface_to_csv(surface));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void ByteReader::need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("binary record truncated");
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
}

double ByteReader::f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::string ByteReader::raw(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::vector<std::uint8_t> encode_surface_binary(const Eigen::MatrixXd& values, const std::string& manifest_ref) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + manifest_ref.size() + 8 * values.size());
    put_u32(out, static_cast<std::uint32_t>(manifest_ref.size()));
    out.insert(out.end(), manifest_ref.begin(), manifest_ref.end());
    for (Eigen::Index n = 0; n < values.rows(); ++n) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) put_f64(out, values(n, j));
    }
    return out;
}

SurfaceBlob decode_surface_binary(const std::vector<std::uint8_t>& bytes, int rows, int cols) {
    ByteReader in(bytes);
    SurfaceBlob blob;
    blob.manifest_ref = in.raw(in.u32());
    blob.values.resize(rows, cols);
    for (int n = 0; n < rows; ++n) {
        for (int j = 0; j < cols; ++j) blob.values(n, j) = in.f64();
    }
    if (!in.at_end()) throw IoError("surface binary: trailing bytes (shape mismatch with manifest)");
    return blob;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace amerop
