#pragma once

// Reader and writer for STEP physical files (ISO 10303-21 clear text).

#include <string>
#include <string_view>

#include "mvd/ifc/model.hpp"
#include "mvd/ifc/schema.hpp"

namespace mvd::ifc {

struct SpfReadOptions {
    // When set, use this schema id instead of the one in FILE_SCHEMA.
    std::string schema_override;
};

// Parse a file / an in-memory buffer.  Errors carry a line number in
// ModelError::line.  The returned model is finalized: indexes are built
// and all references are resolved.
Model read_spf_file(const std::string& path, SchemaRepository& schemas,
                    const SpfReadOptions& options = {});
Model read_spf_text(std::string_view text, SchemaRepository& schemas,
                    const SpfReadOptions& options = {}, const std::string& origin = "<memory>");

// Serialize a model.  Output is deterministic: instances in storage order,
// ISO strings re-escaped, reals in shortest round-trip form.
void write_spf_file(const Model& model, const std::string& path);
std::string write_spf_text(const Model& model);

// STEP string escapes (shared with tests).
std::string decode_step_string(std::string_view raw, std::size_t line);
std::string encode_step_string(std::string_view utf8);

}  // namespace mvd::ifc
