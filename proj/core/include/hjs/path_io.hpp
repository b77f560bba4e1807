#pragma once

#include "hjs/path.hpp"

#include <iosfwd>
#include <string>

namespace hjs {

enum class PathFormat { Jsonl, Binary };

PathFormat parse_path_format(const std::string& name);
std::string to_string(PathFormat format);
/// "jsonl" or "bin".
std::string file_extension(PathFormat format);

/// One header line, then samples and events in time order. The event of a
/// jump precedes its post-jump sample. Components are one-based.
void write_path_jsonl(std::ostream& out, const Path& path);

/// Little-endian layout:
///   header  "HJSM" u16 version u16 reserved u32 M u64 n_events u64 n_samples
///           f64 horizon u64 seed u8[32] model digest
///   events  n_events x (f64 time, u32 component, one-based)
///   samples n_samples x (u8 kind, f64 t, f64 x, M x f64 row sums)
void write_path_binary(std::ostream& out, const Path& path);

void write_path(std::ostream& out, const Path& path, PathFormat format);

/// Readers restore events, skeleton, horizon, seed and model hash.
Path read_path_jsonl(std::istream& in);
Path read_path_binary(std::istream& in);

} // namespace hjs
