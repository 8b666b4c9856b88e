#include "convsarc/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "convsarc/encoder.hpp"
#include "convsarc/errors.hpp"

namespace convsarc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'W', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_weights(const std::string& path, EncoderParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write weights file: " + path);
    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, kVersion);
    auto refs = tensor_refs(params);
    write_pod<std::uint64_t>(out, refs.size());
    for (const auto& ref : refs) {
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ref.name.size()));
        out.write(ref.name.data(), static_cast<std::streamsize>(ref.name.size()));
        write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ref.rows));
        write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ref.cols));
        out.write(reinterpret_cast<const char*>(ref.data),
                  static_cast<std::streamsize>(ref.size() * sizeof(double)));
    }
    if (!out) throw RuntimeFailure("short write to weights file: " + path);
}

void load_weights(const std::string& path, EncoderParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeFailure("cannot open weights file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw RuntimeFailure("not a weights file: " + path);
    }
    if (read_pod<std::uint32_t>(in) != kVersion) {
        throw RuntimeFailure("unsupported weights format version in " + path);
    }

    auto refs = tensor_refs(params);
    std::unordered_map<std::string, TensorRef*> by_name;
    for (auto& ref : refs) by_name[ref.name] = &ref;

    std::uint64_t count = read_pod<std::uint64_t>(in);
    std::uint64_t filled = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
        std::uint32_t name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint64_t rows = read_pod<std::uint64_t>(in);
        std::uint64_t cols = read_pod<std::uint64_t>(in);
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw RuntimeFailure("unexpected tensor '" + name + "' in " + path);
        }
        TensorRef* ref = it->second;
        if (static_cast<std::uint64_t>(ref->rows) != rows ||
            static_cast<std::uint64_t>(ref->cols) != cols) {
            throw RuntimeFailure("tensor '" + name + "' has shape " +
                                 std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", expected " + std::to_string(ref->rows) + "x" +
                                 std::to_string(ref->cols));
        }
        in.read(reinterpret_cast<char*>(ref->data),
                static_cast<std::streamsize>(ref->size() * sizeof(double)));
        ++filled;
    }
    if (!in || filled != refs.size()) {
        throw RuntimeFailure("incomplete weights file: " + path);
    }
}

}  // namespace convsarc
