// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shorthand encodings:
//   chiplet  A-T-S   e.g. 64-7-512
//   mapping  O-D-K   e.g. 1-OS-0
//   package  I-P-M   e.g. 2.5D-RDL-DDR5, 2.5D+3D-HB/RDL-HBM3
// and the canonical long form
//   <count>|<A-T-S>;...|<O-D-K>|<share:0/1>|<I-P-M>|<proto>|<topo>

#include <string>
#include <string_view>
#include <vector>

#include "chipdse/types.hpp"

namespace chipdse {

ChipletSpec parse_chiplet(std::string_view text);
std::string format_chiplet(const ChipletSpec& c);

/// Comma-separated list with optional replica suffix: "96-7-512, 64-7-256 x3".
std::vector<ChipletSpec> parse_chiplet_list(std::string_view text);
/// Inverse of parse_chiplet_list; consecutive identical chiplets collapse into "xN".
std::string format_chiplet_list(const std::vector<ChipletSpec>& chips);

MappingSpec parse_mapping(std::string_view text);
std::string format_mapping(const MappingSpec& m);

/// Decodes I-P-M. The protocol token is optional (the shorthand omits it);
/// when empty, the only or most permissive legal protocol is chosen:
/// 2D -> NA, 2.5D -> UCS, 3D -> UC3, 2.5D+3D -> UC3/UCS.
PackageSpec parse_package(std::string_view ipm, std::string_view protocol = {});
std::string format_package(const PackageSpec& p);
std::string format_protocol(const PackageSpec& p);

std::string format_config(const SystemConfig& cfg);
SystemConfig parse_config(std::string_view text);

}  // namespace chipdse
