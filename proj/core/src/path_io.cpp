#include "hjs/path_io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace hjs {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'J', 'S', 'M'};
constexpr std::uint16_t kVersion = 1;

const char* kind_name(SampleKind kind) {
    switch (kind) {
    case SampleKind::Grid:
        return "grid";
    case SampleKind::PreJump:
        return "pre_jump";
    case SampleKind::PostJump:
        return "post_jump";
    case SampleKind::Terminal:
        return "terminal";
    }
    return "grid";
}

SampleKind kind_from_name(const std::string& name) {
    if (name == "grid") {
        return SampleKind::Grid;
    }
    if (name == "pre_jump") {
        return SampleKind::PreJump;
    }
    if (name == "post_jump") {
        return SampleKind::PostJump;
    }
    if (name == "terminal") {
        return SampleKind::Terminal;
    }
    throw std::runtime_error("path file: unknown sample kind \"" + name + "\"");
}

template <class U>
void put_le(std::ostream& out, U value) {
    std::array<char, sizeof(U)> bytes;
    for (std::size_t k = 0; k < sizeof(U); ++k) {
        bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) {
    put_le(out, std::bit_cast<std::uint64_t>(v));
}

template <class U>
U get_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw std::runtime_error("path file: truncated");
    }
    U value = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k) {
        value |= static_cast<U>(bytes[k]) << (8 * k);
    }
    return value;
}

double get_f64(std::istream& in) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in));
}

std::array<unsigned char, 32> digest_bytes(const std::string& hex) {
    std::array<unsigned char, 32> out{};
    if (hex.empty()) {
        return out;
    }
    if (hex.size() != 64) {
        throw std::invalid_argument("model hash must be 64 hex digits");
    }
    for (std::size_t k = 0; k < 32; ++k) {
        out[k] = static_cast<unsigned char>(std::stoul(hex.substr(2 * k, 2), nullptr, 16));
    }
    return out;
}

std::string digest_hex(const std::array<unsigned char, 32>& bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    bool all_zero = true;
    std::string hex;
    for (unsigned char b : bytes) {
        all_zero = all_zero && b == 0;
        hex += kDigits[b >> 4];
        hex += kDigits[b & 0xF];
    }
    return all_zero ? std::string() : hex;
}

} // namespace

PathFormat parse_path_format(const std::string& name) {
    if (name == "jsonl") {
        return PathFormat::Jsonl;
    }
    if (name == "bin") {
        return PathFormat::Binary;
    }
    throw std::invalid_argument("unknown path format \"" + name + "\" (expected jsonl or bin)");
}

std::string to_string(PathFormat format) {
    return format == PathFormat::Jsonl ? "jsonl" : "bin";
}

std::string file_extension(PathFormat format) {
    return to_string(format);
}

void write_path_jsonl(std::ostream& out, const Path& path) {
    const auto& sk = path.skeleton;
    nlohmann::json header{{"type", "header"},
                          {"format", "hjs-path"},
                          {"version", kVersion},
                          {"dimension", sk.dimension()},
                          {"horizon", path.horizon},
                          {"seed", path.seed},
                          {"model_digest", path.model_hash},
                          {"n_events", path.events.size()},
                          {"n_samples", sk.size()}};
    out << header.dump() << '\n';

    std::size_t next_event = 0;
    auto emit_event = [&] {
        const auto& e = path.events[next_event++];
        out << nlohmann::json{{"type", "event"}, {"t", e.time}, {"component", e.component + 1}}.dump()
            << '\n';
    };
    for (std::size_t k = 0; k < sk.size(); ++k) {
        if (sk.kind(k) == SampleKind::PostJump && next_event < path.events.size()) {
            emit_event();
        }
        const auto sums = sk.row_sums(k);
        nlohmann::json rec{{"type", "sample"},
                           {"kind", kind_name(sk.kind(k))},
                           {"t", sk.time(k)},
                           {"x", sk.x(k)},
                           {"row_sums", std::vector<double>(sums.begin(), sums.end())}};
        out << rec.dump() << '\n';
    }
    while (next_event < path.events.size()) {
        emit_event();
    }
}

void write_path_binary(std::ostream& out, const Path& path) {
    const auto& sk = path.skeleton;
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint16_t>(out, 0);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sk.dimension()));
    put_le<std::uint64_t>(out, path.events.size());
    put_le<std::uint64_t>(out, sk.size());
    put_f64(out, path.horizon);
    put_le<std::uint64_t>(out, path.seed);
    const auto digest = digest_bytes(path.model_hash);
    out.write(reinterpret_cast<const char*>(digest.data()), digest.size());
    for (const auto& e : path.events) {
        put_f64(out, e.time);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.component + 1));
    }
    for (std::size_t k = 0; k < sk.size(); ++k) {
        put_le<std::uint8_t>(out, static_cast<std::uint8_t>(sk.kind(k)));
        put_f64(out, sk.time(k));
        put_f64(out, sk.x(k));
        for (double s : sk.row_sums(k)) {
            put_f64(out, s);
        }
    }
}

void write_path(std::ostream& out, const Path& path, PathFormat format) {
    if (format == PathFormat::Jsonl) {
        write_path_jsonl(out, path);
    } else {
        write_path_binary(out, path);
    }
}

Path read_path_jsonl(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("path file: missing header");
    }
    const auto header = nlohmann::json::parse(line);
    if (header.value("type", "") != "header") {
        throw std::runtime_error("path file: first record is not a header");
    }
    Path path;
    const auto m = header.at("dimension").get<std::size_t>();
    path.skeleton = Skeleton(m);
    path.horizon = header.at("horizon").get<double>();
    path.seed = header.at("seed").get<std::uint64_t>();
    path.model_hash = header.at("model_digest").get<std::string>();
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto rec = nlohmann::json::parse(line);
        const auto type = rec.at("type").get<std::string>();
        if (type == "event") {
            const auto c = rec.at("component").get<std::size_t>();
            if (c < 1 || c > m) {
                throw std::runtime_error("path file: component out of range");
            }
            path.events.push_back({rec.at("t").get<double>(), c - 1});
        } else if (type == "sample") {
            const auto sums = rec.at("row_sums").get<std::vector<double>>();
            if (sums.size() != m) {
                throw std::runtime_error("path file: row_sums length differs from dimension");
            }
            path.skeleton.push(rec.at("t").get<double>(), rec.at("x").get<double>(), sums,
                               kind_from_name(rec.at("kind").get<std::string>()));
        } else {
            throw std::runtime_error("path file: unknown record type \"" + type + "\"");
        }
    }
    return path;
}

Path read_path_binary(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw std::runtime_error("path file: bad magic");
    }
    if (get_le<std::uint16_t>(in) != kVersion) {
        throw std::runtime_error("path file: unsupported version");
    }
    get_le<std::uint16_t>(in);
    const std::size_t m = get_le<std::uint32_t>(in);
    const auto n_events = get_le<std::uint64_t>(in);
    const auto n_samples = get_le<std::uint64_t>(in);
    Path path;
    path.skeleton = Skeleton(m);
    path.horizon = get_f64(in);
    path.seed = get_le<std::uint64_t>(in);
    std::array<unsigned char, 32> digest{};
    if (!in.read(reinterpret_cast<char*>(digest.data()), digest.size())) {
        throw std::runtime_error("path file: truncated");
    }
    path.model_hash = digest_hex(digest);
    path.events.reserve(n_events);
    for (std::uint64_t k = 0; k < n_events; ++k) {
        const double t = get_f64(in);
        const std::size_t c = get_le<std::uint32_t>(in);
        if (c < 1 || c > m) {
            throw std::runtime_error("path file: component out of range");
        }
        path.events.push_back({t, c - 1});
    }
    path.skeleton.reserve(n_samples);
    std::vector<double> sums(m);
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        const auto kind = get_le<std::uint8_t>(in);
        if (kind > static_cast<std::uint8_t>(SampleKind::Terminal)) {
            throw std::runtime_error("path file: bad sample kind");
        }
        const double t = get_f64(in);
        const double x = get_f64(in);
        for (auto& s : sums) {
            s = get_f64(in);
        }
        path.skeleton.push(t, x, sums, static_cast<SampleKind>(kind));
    }
    return path;
}

} // namespace hjs
