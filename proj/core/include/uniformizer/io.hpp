#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uniformizer/energy.hpp"
#include "uniformizer/graph_space.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer {

/// Parses a domain document:
///   {"vertices": [{"id", "measure", "boundary", "coords"?, "frontier"?}, ...],
///    "edges": [{"u", "v", "length"}, ...]}
/// Malformed JSON and invariant violations raise InputError carrying the
/// 1-based line of the offending token or list element.
GraphSpace parse_domain(const std::string& text);
GraphSpace load_domain(const std::string& path);

std::string domain_to_json(const GraphSpace& space);

/// Same schema with transformed lengths and measures, per-edge "mass", and an
/// "infinity" block when attached.
std::string transformed_to_json(const TransformedSpace& t);

/// {"theta", "mesh_scale", "nu": {id: value}}.
std::string measure_to_json(const GraphSpace& space, const BoundaryMeasure& nu);
BoundaryMeasure parse_measure(const std::string& text, const GraphSpace& space);

/// Vertex values as {"values": {id: value}, "infinity"?: value}.
/// `u` may carry one extra trailing entry for infinity.
std::string field_to_json(const GraphSpace& space, std::span<const double> u);
/// Accepts {"values": {...}} or a bare {id: value} object. Missing ids are NaN.
ScalarField parse_field(const std::string& text, const GraphSpace& space,
                        std::optional<double>* infinity = nullptr);

std::string read_text_file(const std::string& path);
/// Writes through a temporary sibling file and renames it into place.
void write_text_file_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace uniformizer
