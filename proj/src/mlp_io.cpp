#include <cstring>

#include "amerop/mlp.hpp"
#include "amerop/surface_io.hpp"

namespace amerop {

void append_mlp_body(std::vector<std::uint8_t>& out, const Mlp& net) {
    put_u32(out, static_cast<std::uint32_t>(net.depth()));
    for (int d : net.layer_dims) put_u32(out, static_cast<std::uint32_t>(d));
    for (const auto& w : net.weights) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) put_f64(out, w(i, j));
        }
    }
    for (const auto& b : net.biases) {
        for (Eigen::Index i = 0; i < b.size(); ++i) put_f64(out, b[i]);
    }
}

Mlp read_mlp_body(ByteReader& in) {
    const std::uint32_t layers = in.u32();
    if (layers == 0 || layers > 4096) throw IoError("mlp record: implausible layer count");
    std::vector<int> dims(layers + 1);
    for (auto& d : dims) d = static_cast<int>(in.u32());
    Mlp net = Mlp::zeros(dims);
    for (auto& w : net.weights) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = in.f64();
        }
    }
    for (auto& b : net.biases) {
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = in.f64();
    }
    return net;
}

std::vector<std::uint8_t> encode_mlp(const Mlp& net) {
    std::vector<std::uint8_t> out{'D', 'N', 'O', 'P'};
    put_u32(out, kMlpFormatVersion);
    append_mlp_body(out, net);
    return out;
}

Mlp decode_mlp(const std::vector<std::uint8_t>& bytes) {
    ByteReader in(bytes);
    if (in.raw(4) != "DNOP") throw IoError("mlp checkpoint: bad magic");
    if (in.u32() != kMlpFormatVersion) throw IoError("mlp checkpoint: unsupported version");
    Mlp net = read_mlp_body(in);
    if (!in.at_end()) throw IoError("mlp checkpoint: trailing bytes");
    return net;
}

}  // namespace amerop
