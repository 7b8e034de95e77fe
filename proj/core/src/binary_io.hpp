#pragma once

// Little helpers for the versioned index files. Host byte order; index files
// are not meant to move between architectures.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "cie/error.hpp"

namespace cie::detail {

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IndexFormatError("truncated index file");
  return v;
}

inline std::string get_string(std::istream& in) {
  auto n = get<std::uint32_t>(in);
  if (n > (1u << 30)) throw IndexFormatError("implausible string length in index file");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw IndexFormatError("truncated index file");
  return s;
}

}  // namespace cie::detail
