#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amerop/fd_pricer.hpp"

namespace amerop {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// CSV layout: header row "x" followed by the t values; each following row
/// is x_j followed by u(t_0, x_j) .. u(t_N, x_j).
std::string surface_to_csv(const PriceSurface& surface);
void write_surface_csv(const std::filesystem::path& path, const PriceSurface& surface);

/// Flat binary: u32 length + manifest reference bytes, then the values
/// matrix as little-endian f64, row-major (time-major). The shape is carried
/// by the manifest, not the file.
std::vector<std::uint8_t> encode_surface_binary(const Eigen::MatrixXd& values, const std::string& manifest_ref);

struct SurfaceBlob {
    std::string manifest_ref;
    Eigen::MatrixXd values;
};

SurfaceBlob decode_surface_binary(const std::vector<std::uint8_t>& bytes, int rows, int cols);

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Little-endian primitives shared with the checkpoint format.
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f64(std::vector<std::uint8_t>& out, double v);

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32();
    double f64();
    std::string raw(std::size_t n);
    [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const;

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace amerop
