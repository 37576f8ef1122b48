#pragma once

#include <string>
#include <string_view>

namespace honeyttl {

inline bool looks_gzipped(std::string_view bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1F &&
         static_cast<unsigned char>(bytes[1]) == 0x8B;
}

struct GunzipResult {
  std::string data;
  bool truncated = false; // stream ended early or was corrupt past some point
};

/// Inflates one or more concatenated gzip members. Whatever decodes cleanly
/// before a corrupt or truncated tail is kept and `truncated` is set.
GunzipResult gunzip(std::string_view compressed);

std::string gzip_compress(std::string_view plain);

} // namespace honeyttl
