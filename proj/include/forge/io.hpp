#pragma once

// Serialization for the library's artifact types: JSON for polynomials,
// mixing measures, curve specs, and transform tables; CSV for lattice laws
// and simulated paths; a small binary container for grid densities. JSON
// objects use alphabetically ordered keys throughout, so serializing the
// same data twice produces identical bytes.

#include <string>

#include "forge/detset.hpp"
#include "forge/exchangeable.hpp"
#include "forge/fourierlab.hpp"
#include "forge/levymix.hpp"
#include "forge/multipoly.hpp"
#include "forge/simplexmap.hpp"
#include "json.hpp"

namespace forge::io {

using json = nlohmann::json;

// Multivariate polynomial with exact rational coefficients:
// {"nvars": n, "terms": [{"exps": [..], "num": "..", "den": ".."}]}
// with terms sorted in the polynomial's canonical monomial order and
// numerator/denominator rendered as decimal strings (arbitrary precision).
json poly_to_json(const PolyQ& p);
PolyQ poly_from_json(const json& j);

// Discretized mixing measure:
// {"atoms": [..], "components": [{"prob": p, "weights": [..]}]}
json mixing_to_json(const MixingMeasure& m);
MixingMeasure mixing_from_json(const json& j);

// Lattice law CSV with header "value,probability", one row per atom.
std::string lattice_law_csv(const LatticeLaw& law);
LatticeLaw lattice_law_from_csv(const std::string& text);

// Simulated path CSV with header "t,value".
std::string path_csv(const PathSample& path);

// Hybrid transform table:
// {"time": t, "u_grid": [..], "s_grid": [..],
//  "values": [{"im": .., "re": ..} .. row-major over (u, s)]}
json hybrid_table_to_json(const HybridTable& table);
HybridTable hybrid_table_from_json(const json& j);

// Curve description for the determining-set search:
// {"family": "moment|laplace_atoms|laplace_convolution|laplace_scaled|"
//            "poisson|power|complex_pq|rational",
//  "N": n, ...family-specific fields}.
json curve_spec_to_json(const CurveSpec& spec);
CurveSpec curve_spec_from_json(const json& j);

// Grid density binary container: magic "FGRD", u32 version, i32 d, i32 m,
// f64 R, then m^d little-endian doubles in the grid's row-major order.
void write_grid_binary(const GridDensity& g, const std::string& path);
GridDensity read_grid_binary(const std::string& path);

// CSV rendering of a grid density; supported for d <= 2 only (throws
// otherwise). d=1: "x,value" rows; d=2: "x0,x1,value" rows.
std::string grid_csv(const GridDensity& g);

json grid_to_json(const GridDensity& g);

// Plain file helpers. Writers create parent directories as needed.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
json read_json_file(const std::string& path);
// Writes dump(2) plus a trailing newline; stable bytes for equal values.
void write_json_file(const std::string& path, const json& j);

// Converts a stored artifact between formats. Supported conversions:
// binary grid (.grid) -> "csv" (d <= 2) or "json"; lattice-law CSV ->
// "json"; any JSON artifact -> "json" (canonicalizing re-emit). The output
// format "binary-grid" re-encodes a binary grid container. Throws
// std::invalid_argument for unsupported combinations.
void export_artifact(const std::string& in_path, const std::string& format,
                     const std::string& out_path);

}  // namespace forge::io
