#pragma once

// JSON instance files: {"c": [...], "A": [[...], ...], "b": [...],
// "G": [[...]] or "Gs": [[[...]], ...], "name": "...", "rho_star": x,
// "query": [...]}. Exactly one of "G" and "Gs" must be present.

#include <optional>
#include <string>

#include "rdo/core.h"

namespace rdo::cli {

struct InstanceDocument {
  RawInstance raw;
  std::optional<VectorXd> query;  // point of interest, written by gen-hard
};

// Throws Error(kParseError) with line or key context; shape checks are left
// to validate_instance.
InstanceDocument parse_document(const std::string& text, const std::string& source = "<input>");
InstanceDocument read_document(const std::string& path);

RdoInstance parse_instance(const std::string& path);

// Numbers are written with 17 significant digits so parsing the output
// reproduces every entry bit for bit. Single-matrix instances use "G".
std::string emit_document(const InstanceDocument& doc);
std::string emit_instance(const RdoInstance& inst);

RawInstance to_raw(const RdoInstance& inst);

}  // namespace rdo::cli
