#pragma once

#include <cstdint>
#include <string>

namespace bi {

/// Half-open is not used here: spans are inclusive, 1-based, as editors count.
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool operator==(const SourceSpan&) const = default;
};

}  // namespace bi
