#pragma once

#include <filesystem>
#include <string_view>

#include "mlcheck/propdsl.hpp"

namespace mlcheck {

/// Parses the line-oriented property format:
///
///   name   <identifier>
///   var    x y
///   let    s = gender            # feature name, number or [v1, v2, ...]
///   assume <cond>
///   assume forall-features i except s: x[i] == y[i]
///   assume forall f in T: x[f] == t[f]
///   assert <cond>
///
/// `#` starts a comment. Loops unroll at parse time into one assume clause
/// per iteration.
PropertySpec parse_property_file(std::string_view text, const DatasetSchema& schema);

/// Trojan description as JSON: {"features": [0, "pix1"], "trigger": [...],
/// "target": [4]}. `trigger` holds one value per schema feature.
PropertySpec parse_trojan_file(std::string_view json_text, const DatasetSchema& schema);

/// Resolves a property selector: `fairness:s=<name|index>`,
/// `concept:<formula>`, `trojan:<json file>`, or a property file path.
PropertySpec load_property(std::string_view selector, const DatasetSchema& schema,
                           const std::filesystem::path& base_dir = {});

}  // namespace mlcheck
