#pragma once

#include "univex/analysis.hpp"
#include "univex/bodies.hpp"
#include "univex/decomposition.hpp"
#include "univex/perturbation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace univex::io {

using Json = nlohmann::ordered_json;

/// Malformed body document. what() starts with the JSON path of the offending field.
class SchemaError : public std::invalid_argument {
public:
    SchemaError(const std::string& path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(path)
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct BodySpec {
    std::string id;
    ConvexBody body;
};

/// Body schema (every object may carry "id"; unknown keys are rejected):
///   {"type": "polytope", "vertices": [[x, y], ...]}
///   {"type": "ball", "center": [...], "radius": r}
///   {"type": "ellipsoid", "shape": [[...], ...]}                      h(u) = sqrt(uᵀ M u)
///   {"type": "segment", "endpoints": [[...], [...]]}
///   {"type": "harmonic", "dimension": n, "constant": c, "basis": "orthonormal" | "trig",
///    "terms": [{"m": m, "j": j, "a": a}, ...]}
///   {"type": "minkowski", "dimension": n,
///    "parts": [{"weight": w, "rotation": [[...]] | "angle": α, "body": {...}}, ...]}
///   {"type": "linear_image", "matrix": [[...], ...], "body": {...}}
/// The "trig" basis (n = 2 only) reads a as the coefficient of cos mφ (j = 1) or
/// sin mφ (j = 2), and of the constant function for m = 0.
BodySpec parse_body(const Json& doc);
BodySpec parse_body_text(const std::string& text);
BodySpec read_body_file(const std::string& path);

/// Canonical form: harmonic terms in the orthonormal basis, rotations as matrices.
Json body_to_json(const ConvexBody& body, const std::string& id = {});

/// JSON text with every number printed with 17 significant digits.
std::string dump(const Json& value, int indent = 2);

Json matrix_to_json(const Matrix& m);
Json to_json(const HarmonicExpansion& e);
Json to_json(const UniversalityCertificate& c);
Json to_json(const DecompositionResult& r, const BodySpec& generator);
Json to_json(const PerturbationSearchReport& r);

/// Header lines "# univex <version>" and "# config <json>" for CSV outputs.
void write_csv_preamble(std::ostream& out, const Json& config);
void write_csv(std::ostream& out, const HarmonicExpansion& e);
void write_csv(std::ostream& out, const UniversalityCertificate& c);
void write_csv(std::ostream& out, const DecompositionResult& r);
void write_csv(std::ostream& out, const PerturbationSearchReport& r);

/// printf-style %.17g; non-finite values become "nan", "inf", "-inf".
std::string format_double(double x);

} // namespace univex::io
