#pragma once

#include <cstdint>
#include <string>

namespace isl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Deterministic shortest-ish decimal for CSV output (12 significant
/// digits covers every quantity we emit).
std::string fmt_double(double v);

/// Leading metadata line shared by all output files:
/// "# islsync v<ver> seed=<seed> scenario=<name> pooling=<protocol>[ extra]".
std::string metadata_line(std::uint64_t seed, const std::string& scenario,
                          const std::string& pooling, const std::string& extra = {});

/// Writes text to path, creating parent directories. Throws on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace isl
