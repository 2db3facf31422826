#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "annulus/operator_classes.hpp"

namespace annulus {

using Json = nlohmann::json;

/// Tuple interchange format:
///   { "r": real,
///     "operators": [ { "dim": n, "data": [[re, im], ...] } ] }
/// with row-major data of length dim^2. Keys are emitted sorted and floats
/// with the shortest round-trip decimal, so write(parse(x)) is
/// byte-identical on canonical-form files.
Json tuple_to_json(const OperatorTuple& tuple);
OperatorTuple tuple_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Rectangular variant used for block bases: { "rows", "cols", "data" }.
Json basis_to_json(const ComplexMatrix& m);

std::string canonical_dump(const Json& j);

/// Read the file, remember its digest, and apply an optional command-line
/// radius override (the override wins; r_conflict reports a mismatch with
/// an embedded value so callers can warn).
struct LoadedTuple {
  OperatorTuple tuple;
  std::string digest;
  bool r_overridden = false;
  std::optional<double> file_r;
};

LoadedTuple load_tuple_file(const std::filesystem::path& path,
                            std::optional<double> r_override = std::nullopt);

/// FNV-1a 64-bit digest, 16 hex characters.
std::string digest_hex(const std::string& bytes);

/// Write via a sibling temp file followed by an atomic rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

ToleranceConfig tolerances_from_env();
Json tolerances_to_json(const ToleranceConfig& tol);

Json make_report(const std::string& command, const std::string& input_digest,
                 const ToleranceConfig& tol, Json results, const std::string& status);

}  // namespace annulus
