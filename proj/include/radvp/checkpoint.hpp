#pragma once

#include <optional>
#include <string>

#include "radvp/ensemble.hpp"

namespace radvp {

enum class CheckpointFormat { binary, csv };

CheckpointFormat parse_checkpoint_format(const std::string& name);

struct Checkpoint {
  Ensemble ensemble;
  std::optional<TangentState> tangents;
  int schema_version = 0;
};

// Binary: a magic line, one JSON header line, then little-endian doubles row by row.
// CSV: '#' header lines, a column line, then shortest round-trip decimals.
// Both reload bit-exactly.
void write_checkpoint(const std::string& path, const Ensemble& ens, const TangentState* tangents,
                      CheckpointFormat fmt);
// Format is detected from the file.  Malformed files raise ConfigError.
Checkpoint read_checkpoint(const std::string& path);

std::string checkpoint_file_name(std::size_t index, CheckpointFormat fmt);

}  // namespace radvp
