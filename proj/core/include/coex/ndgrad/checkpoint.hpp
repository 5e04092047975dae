#pragma once

#include <string>

#include "coex/ndgrad/params.hpp"

namespace coex::nd {

/// Self-describing binary checkpoint. Header: magic "COEX", u32 version.
/// Then one record per tensor, in name order: u32 name length, name bytes,
/// u32 rank, u64 dims, little-endian f64 payload. Records run to EOF.
void save_checkpoint(const std::string& path, const ParamSet& params);
ParamSet load_checkpoint(const std::string& path);

}  // namespace coex::nd
