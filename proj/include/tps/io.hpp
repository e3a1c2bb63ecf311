#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "tps/dual_search.hpp"
#include "tps/equivalence.hpp"
#include "tps/kernel_check.hpp"

namespace tps::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kOperatorFormat = "tps-spectra/operator.v1";
inline constexpr const char* kSpectrumFormat = "tps-spectra/spectrum.v1";
inline constexpr const char* kCertFormat = "tps-spectra/cert.v1";
inline constexpr const char* kSearchFormat = "tps-spectra/search.v1";
inline constexpr const char* kEquivFormat = "tps-spectra/equiv.v1";

json complex_json(Complex z);
json class_json(const LocalityClass& cls);
ClassPtr class_from_json(const json& j, int n);

// Terms are written as expanded Pauli strings in canonical order.
json to_json(const OperatorExpr& op, std::optional<std::uint64_t> seed = std::nullopt);
json to_json(const Spectrum& s);
// elapsed_ms is omitted when negative, which keeps reports byte-stable.
json to_json(const CertificateReport& r, std::uint64_t seed, long long elapsed_ms = -1);
json to_json(const SymmetryElement& e);
json to_json(const EquivalenceVerdict& v);
json to_json(const ProbeReport& p);
json to_json(const SearchReport& r);

/// Parses an operator file. Syntax and content errors throw
/// ErrorKind::invalid_argument, and terms outside the declared class throw
/// ErrorKind::not_in_class; both carry a "source:line:" prefix.
OperatorExpr operator_from_json(const std::string& text, const std::string& source);
OperatorExpr load_operator(const std::string& path);

// Parses JSON text, reporting syntax errors as "source:line:col: ...".
json parse(const std::string& text, const std::string& source);

std::string read_file(const std::string& path);
// Writes atomically through a temporary file in the same directory.
void write_file(const std::string& path, const std::string& text);
// Two-space indentation and a trailing newline.
std::string dump(const json& j);

// Flattens scalar fields into a header row plus one row per record. Nested
// objects become dotted column names; arrays are dropped.
std::string to_csv(const json& records);

}  // namespace tps::io
