#pragma once

#include <filesystem>
#include <iosfwd>

#include "decaylab/snapshot.hpp"

namespace decaylab {

/// CSV with header `r,value,rate,mask` (radial) or `x,y,z,value,rate,mask`
/// (Cartesian), one row per node in storage order, doubles printed with 17
/// significant digits.
void write_snapshot_csv(const FieldSnapshot& snapshot, std::ostream& out);

/// Flat binary field file; the layout is documented in docs/formats.md.
void write_field_binary(const FieldSnapshot& snapshot,
                        const std::filesystem::path& path);
FieldSnapshot read_field_binary(const std::filesystem::path& path);

}  // namespace decaylab
