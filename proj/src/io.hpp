#pragma once

#include <cstdint>
#include <string>

namespace coltree {

// Shortest round-trippable decimal form; infinities render as "+inf"/"-inf".
std::string fmt_double(double x);

// Writes via a sibling temp file plus rename so readers never observe a
// partially written file. Throws InvalidArgument on any I/O failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& text);
std::string fnv1a64_hex(const std::string& text);

}  // namespace coltree
