#pragma once

#include <cstring>
#include <fstream>

#include "bitrec/nn/network.hpp"

namespace bitrec {
namespace nn {

// Model container, little-endian:
//   magic "BITR" | version u32 | D u32 | channels u32 | plane_index i32 |
//   q u32 | N u32 | sigmoid_head u32 | normalization f32 |
//   tensor count u32 | per tensor: name_len u32, name bytes,
//   element count u32, raw f32 data.

inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

inline void put_f32(std::string& out, float v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

class Reader {
public:
    Reader(const std::string& bytes) : data_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, data_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    float f32() {
        need(4);
        float v;
        std::memcpy(&v, data_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > data_.size())
            throw format_error("model file truncated", pos_);
    }
    const std::string& data_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string save_model(BitplaneNetwork<float>& net) {
    std::string out;
    out += "BITR";
    detail::put_u32(out, kModelVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(net.depth));
    detail::put_u32(out, static_cast<std::uint32_t>(net.channels));
    detail::put_u32(out, static_cast<std::uint32_t>(net.plane_index));
    detail::put_u32(out, static_cast<std::uint32_t>(net.source_bits));
    detail::put_u32(out, static_cast<std::uint32_t>(net.container_bits));
    detail::put_u32(out, net.sigmoid_head ? 1u : 0u);
    detail::put_f32(out, static_cast<float>((1u << net.container_bits) - 1u));
    auto params = net.params();
    detail::put_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        detail::put_u32(out, static_cast<std::uint32_t>(p.name.size()));
        out += p.name;
        detail::put_u32(out, static_cast<std::uint32_t>(p.value->size()));
        for (float v : *p.value) detail::put_f32(out, v);
    }
    return out;
}

inline BitplaneNetwork<float> load_model(const std::string& bytes) {
    detail::Reader r(bytes);
    if (r.str(4) != "BITR") throw format_error("bad magic, expected BITR", 0);
    const std::uint32_t version = r.u32();
    if (version != kModelVersion)
        throw format_error("unsupported model version " + std::to_string(version), 4);
    const int depth = static_cast<int>(r.u32());
    const int channels = static_cast<int>(r.u32());
    const int plane_index = static_cast<std::int32_t>(r.u32());
    const int q = static_cast<int>(r.u32());
    const int n = static_cast<int>(r.u32());
    const bool sigmoid_head = r.u32() != 0;
    (void)r.f32(); // normalization constant, derivable from N

    BitplaneNetwork<float> net(depth, channels, sigmoid_head);
    net.plane_index = plane_index;
    net.source_bits = q;
    net.container_bits = n;

    auto params = net.params();
    const std::uint32_t count = r.u32();
    if (count != params.size())
        throw format_error("tensor count mismatch", r.pos() - 4);
    for (auto& p : params) {
        const std::uint32_t name_len = r.u32();
        const std::string name = r.str(name_len);
        if (name != p.name)
            throw format_error("unexpected tensor name '" + name + "'", r.pos() - name_len);
        const std::uint32_t elems = r.u32();
        if (elems != p.value->size())
            throw format_error("tensor '" + name + "' size mismatch", r.pos() - 4);
        for (auto& v : *p.value) v = r.f32();
    }
    if (!r.at_end()) throw format_error("trailing bytes after model data", r.pos());
    return net;
}

inline void save_model_file(BitplaneNetwork<float>& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path);
    const std::string bytes = save_model(net);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw io_error("write failed: " + path);
}

inline BitplaneNetwork<float> load_model_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return load_model(bytes);
}

} // namespace nn
} // namespace bitrec
