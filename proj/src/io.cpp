#include "univex/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace univex::io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }
std::string child(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

void allow_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
    std::set<std::string> allowed{"type", "id"};
    for (const char* k : keys) allowed.insert(k);
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw SchemaError(child(path, item.key()), "unknown field");
}

const Json& field(const Json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) throw SchemaError(child(path, key), "missing required field");
    return obj.at(key);
}

double number(const Json& v, const std::string& path)
{
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path, "expected a finite number");
    return x;
}

int integer(const Json& v, const std::string& path)
{
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<int>();
}

Vector vector(const Json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], child(path, i));
    return out;
}

Matrix rows_matrix(const Json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty array of rows");
    const Vector first = vector(v[0], child(path, std::size_t{0}));
    Matrix out(static_cast<Eigen::Index>(v.size()), first.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
        const Vector row = vector(v[r], child(path, r));
        if (row.size() != first.size()) throw SchemaError(child(path, r), "rows must have equal length");
        out.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return out;
}

int dimension_of(const Vector& p, const std::string& path)
{
    const int n = static_cast<int>(p.size());
    if (n != 2 && n != 3) throw SchemaError(path, "points must have 2 or 3 coordinates");
    return n;
}

int dimension_field(const Json& obj, const std::string& path)
{
    const int n = integer(field(obj, path, "dimension"), child(path, "dimension"));
    if (n != 2 && n != 3) throw SchemaError(child(path, "dimension"), "expected 2 or 3");
    return n;
}

ConvexBody parse_node(const Json& obj, const std::string& path);

template <class F>
ConvexBody guarded(const std::string& path, F&& build)
{
    try {
        return build();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

ConvexBody parse_harmonic(const Json& obj, const std::string& path)
{
    allow_keys(obj, path, {"dimension", "constant", "basis", "terms"});
    const int n = dimension_field(obj, path);
    const double constant = obj.contains("constant") ? number(obj["constant"], child(path, "constant")) : 0.0;
    std::string basis = "orthonormal";
    if (obj.contains("basis")) {
        if (!obj["basis"].is_string()) throw SchemaError(child(path, "basis"), "expected \"orthonormal\" or \"trig\"");
        basis = obj["basis"].get<std::string>();
        if (basis != "orthonormal" && basis != "trig")
            throw SchemaError(child(path, "basis"), "expected \"orthonormal\" or \"trig\", got \"" + basis + "\"");
        if (basis == "trig" && n != 2) throw SchemaError(child(path, "basis"), "the trig basis exists for dimension 2 only");
    }
    const Json& terms = field(obj, path, "terms");
    if (!terms.is_array()) throw SchemaError(child(path, "terms"), "expected an array");
    HarmonicExpansion e(n, 0);
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string tp = child(child(path, "terms"), k);
        const Json& t = terms[k];
        if (!t.is_object()) throw SchemaError(tp, "expected an object {m, j, a}");
        for (const auto& item : t.items())
            if (item.key() != "m" && item.key() != "j" && item.key() != "a")
                throw SchemaError(child(tp, item.key()), "unknown field");
        const int m = integer(field(t, tp, "m"), child(tp, "m"));
        const int j = integer(field(t, tp, "j"), child(tp, "j"));
        double a = number(field(t, tp, "a"), child(tp, "a"));
        if (m < 0 || j < 1 || j > harmonic_dimension(n, m))
            throw SchemaError(tp, "index (m=" + std::to_string(m) + ", j=" + std::to_string(j) + ") out of range");
        if (basis == "trig") a *= (m == 0) ? std::sqrt(2.0 * std::numbers::pi) : std::sqrt(std::numbers::pi);
        if (!seen.insert({m, j}).second) throw SchemaError(tp, "duplicate term (m=" + std::to_string(m) + ", j=" + std::to_string(j) + ")");
        e.set_coefficient({m, j}, a);
    }
    return guarded(path, [&] { return ConvexBody::harmonic(constant, std::move(e)); });
}

ConvexBody parse_node(const Json& obj, const std::string& path)
{
    if (!obj.is_object()) throw SchemaError(path, "expected a body object");
    const Json& type_value = field(obj, path, "type");
    if (!type_value.is_string()) throw SchemaError(child(path, "type"), "expected a string");
    const std::string type = type_value.get<std::string>();
    if (obj.contains("id") && !obj["id"].is_string()) throw SchemaError(child(path, "id"), "expected a string");

    if (type == "polytope") {
        allow_keys(obj, path, {"vertices"});
        const Matrix rows = rows_matrix(field(obj, path, "vertices"), child(path, "vertices"));
        dimension_of(rows.row(0).transpose(), child(path, "vertices"));
        return guarded(path, [&] { return ConvexBody::polytope(rows.transpose()); });
    }
    if (type == "ball") {
        allow_keys(obj, path, {"center", "radius"});
        const Vector c = vector(field(obj, path, "center"), child(path, "center"));
        dimension_of(c, child(path, "center"));
        const double r = number(field(obj, path, "radius"), child(path, "radius"));
        return guarded(child(path, "radius"), [&] { return ConvexBody::ball(c, r); });
    }
    if (type == "ellipsoid") {
        allow_keys(obj, path, {"shape"});
        const Matrix m = rows_matrix(field(obj, path, "shape"), child(path, "shape"));
        return guarded(child(path, "shape"), [&] { return ConvexBody::ellipsoid(m); });
    }
    if (type == "segment") {
        allow_keys(obj, path, {"endpoints"});
        const Matrix rows = rows_matrix(field(obj, path, "endpoints"), child(path, "endpoints"));
        if (rows.rows() != 2) throw SchemaError(child(path, "endpoints"), "expected exactly two points");
        dimension_of(rows.row(0).transpose(), child(path, "endpoints"));
        return guarded(path, [&] { return ConvexBody::segment(rows.row(0).transpose(), rows.row(1).transpose()); });
    }
    if (type == "harmonic") return parse_harmonic(obj, path);
    if (type == "minkowski") {
        allow_keys(obj, path, {"dimension", "parts"});
        const int n = dimension_field(obj, path);
        const Json& parts = field(obj, path, "parts");
        if (!parts.is_array() || parts.empty()) throw SchemaError(child(path, "parts"), "expected a non-empty array");
        std::vector<MinkowskiPart> out;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const std::string pp = child(child(path, "parts"), k);
            const Json& p = parts[k];
            if (!p.is_object()) throw SchemaError(pp, "expected an object {weight, rotation | angle, body}");
            for (const auto& item : p.items())
                if (item.key() != "weight" && item.key() != "rotation" && item.key() != "angle" && item.key() != "body")
                    throw SchemaError(child(pp, item.key()), "unknown field");
            MinkowskiPart part;
            part.weight = p.contains("weight") ? number(p["weight"], child(pp, "weight")) : 1.0;
            if (p.contains("rotation") && p.contains("angle"))
                throw SchemaError(pp, "give either \"rotation\" or \"angle\", not both");
            if (p.contains("rotation")) part.rotation = rows_matrix(p["rotation"], child(pp, "rotation"));
            if (p.contains("angle")) {
                if (n != 2) throw SchemaError(child(pp, "angle"), "\"angle\" is only valid in dimension 2");
                part.rotation = rotation_2d(number(p["angle"], child(pp, "angle")));
            }
            part.body = std::make_shared<const ConvexBody>(parse_node(field(p, pp, "body"), child(pp, "body")));
            out.push_back(std::move(part));
        }
        return guarded(path, [&] { return ConvexBody::minkowski(n, std::move(out)); });
    }
    if (type == "linear_image") {
        allow_keys(obj, path, {"matrix", "body"});
        const Matrix m = rows_matrix(field(obj, path, "matrix"), child(path, "matrix"));
        ConvexBody base = parse_node(field(obj, path, "body"), child(path, "body"));
        return guarded(child(path, "matrix"), [&] { return ConvexBody::linear_image(m, std::move(base)); });
    }
    throw SchemaError(child(path, "type"), "unknown body type \"" + type
                                               + "\" (expected polytope, ball, ellipsoid, segment, harmonic, "
                                                 "minkowski or linear_image)");
}

Json vector_to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json columns_to_json(const Matrix& points)
{
    Json out = Json::array();
    for (Eigen::Index c = 0; c < points.cols(); ++c) out.push_back(vector_to_json(points.col(c)));
    return out;
}

void dump_into(std::string& out, const Json& v, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& item : v.items()) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(item.key()).dump();
            out += indent < 0 ? ":" : ": ";
            dump_into(out, item.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const auto& e : v)
            if (e.is_structured()) flat = false;
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += flat ? ", " : ",";
            first = false;
            if (!flat) newline(depth + 1);
            dump_into(out, e, indent, depth + 1);
        }
        if (!flat && !v.empty()) newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float: {
        const double x = v.get<double>();
        out += std::isfinite(x) ? format_double(x) : Json(format_double(x)).dump();
        return;
    }
    default: out += v.dump();
    }
}

} // namespace

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // Keep integral values recognizable as floating point.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

BodySpec parse_body(const Json& doc)
{
    BodySpec spec{doc.is_object() && doc.contains("id") && doc["id"].is_string() ? doc["id"].get<std::string>() : "",
                  parse_node(doc, "$")};
    return spec;
}

BodySpec parse_body_text(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_body(doc);
}

BodySpec read_body_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SchemaError(path, "cannot open body file");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        BodySpec spec = parse_body_text(text.str());
        if (spec.id.empty()) spec.id = path;
        return spec;
    } catch (const SchemaError& e) {
        throw SchemaError(path + " " + e.path(), std::string(e.what()).substr(e.path().size() + 2));
    }
}

Json matrix_to_json(const Matrix& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

Json body_to_json(const ConvexBody& body, const std::string& id)
{
    Json out;
    out["type"] = body.kind();
    if (!id.empty()) out["id"] = id;
    std::visit(overloaded{
                   [&](const Polytope& p) { out["vertices"] = columns_to_json(p.vertices); },
                   [&](const Ball& b) {
                       out["center"] = vector_to_json(b.center);
                       out["radius"] = b.radius;
                   },
                   [&](const Ellipsoid& e) { out["shape"] = matrix_to_json(e.shape); },
                   [&](const Segment& s) {
                       out["endpoints"] = Json::array({vector_to_json(s.first), vector_to_json(s.second)});
                   },
                   [&](const HarmonicBody& h) {
                       out["dimension"] = body.dimension();
                       out["constant"] = h.constant;
                       out["basis"] = "orthonormal";
                       Json terms = Json::array();
                       for (int m = 0; m <= h.terms.max_order(); ++m)
                           for (Eigen::Index j = 0; j < h.terms.block(m).size(); ++j)
                               terms.push_back({{"m", m}, {"j", j + 1}, {"a", h.terms.block(m)[j]}});
                       out["terms"] = terms;
                   },
                   [&](const MinkowskiCombination& c) {
                       out["dimension"] = c.dimension;
                       Json parts = Json::array();
                       for (const auto& p : c.parts)
                           parts.push_back({{"weight", p.weight},
                                            {"rotation", matrix_to_json(p.rotation)},
                                            {"body", body_to_json(*p.body)}});
                       out["parts"] = parts;
                   },
                   [&](const LinearImage& l) {
                       out["matrix"] = matrix_to_json(l.map);
                       out["body"] = body_to_json(*l.base);
                   },
               },
               body.variant());
    return out;
}

std::string dump(const Json& value, int indent)
{
    std::string out;
    dump_into(out, value, indent, 0);
    return out;
}

Json to_json(const HarmonicExpansion& e)
{
    Json coefficients = Json::array();
    for (int m = 0; m <= e.max_order(); ++m)
        for (Eigen::Index j = 0; j < e.block(m).size(); ++j)
            coefficients.push_back({{"m", m}, {"j", j + 1}, {"a", e.block(m)[j]}});
    return {{"dimension", e.dimension()}, {"max_order", e.max_order()}, {"coefficients", coefficients}};
}

Json to_json(const UniversalityCertificate& c)
{
    Json norms = Json::array();
    for (std::size_t m = 0; m < c.norms.size(); ++m)
        norms.push_back({{"m", m}, {"norm", c.norms[m]}, {"above_threshold", c.norms[m] > c.threshold}});
    return {{"body_id", c.body_id},
            {"m_max", c.m_max},
            {"threshold", c.threshold},
            {"norms", norms},
            {"universal", c.universal},
            {"centrally_universal", c.centrally_universal},
            {"failing_orders", c.failing_orders(false)},
            {"failing_even_orders", c.failing_orders(true)}};
}

Json to_json(const DecompositionResult& r, const BodySpec& generator)
{
    Json nodes = Json::array();
    for (const auto& node : r.nodes) {
        if (node.density == 0.0) continue;
        nodes.push_back({{"parameters", vector_to_json(node.parameters)},
                         {"weight", node.quadrature_weight * std::abs(node.density)},
                         {"side", node.density > 0.0 ? "T2" : "T1"}});
    }
    return {{"generator", body_to_json(generator.body, generator.id)},
            {"target", to_json(r.target)},
            {"rotation_count", r.rotation_count},
            {"residual_sup", r.residual_sup},
            {"residual_l2", r.residual_l2},
            {"g_condition", r.g_condition},
            {"nodes", nodes}};
}

Json to_json(const PerturbationSearchReport& r)
{
    Json samples = Json::array();
    for (const auto& s : r.samples) {
        Json item{{"parameter", s.parameter}, {"matrix", matrix_to_json(s.matrix)}, {"rejected", s.rejected}};
        if (!s.rejected) item["norms"] = s.norms;
        samples.push_back(item);
    }
    Json out{{"body_id", r.body_id},
             {"family", to_string(r.family)},
             {"m_max", r.m_max},
             {"threshold", r.threshold},
             {"epsilon", r.epsilon},
             {"required_orders", r.central ? "even" : "all"},
             {"found", r.found()}};
    if (r.winner) {
        out["winner"] = matrix_to_json(*r.winner);
        out["winner_parameter"] = *r.winner_parameter;
        out["distance_to_identity"] = r.distance_to_identity;
        out["certificate"] = to_json(*r.certificate);
    } else {
        out["failing_orders"] = r.failing_orders;
    }
    out["samples"] = samples;
    return out;
}

void write_csv_preamble(std::ostream& out, const Json& config)
{
    out << "# univex " << kVersion << "\n# config " << dump(config, -1) << "\n";
}

void write_csv(std::ostream& out, const HarmonicExpansion& e)
{
    out << "m,j,a\n";
    for (int m = 0; m <= e.max_order(); ++m)
        for (Eigen::Index j = 0; j < e.block(m).size(); ++j)
            out << m << ',' << j + 1 << ',' << format_double(e.block(m)[j]) << '\n';
}

void write_csv(std::ostream& out, const UniversalityCertificate& c)
{
    out << "m,norm\n";
    for (std::size_t m = 0; m < c.norms.size(); ++m) out << m << ',' << format_double(c.norms[m]) << '\n';
}

void write_csv(std::ostream& out, const DecompositionResult& r)
{
    out << "# residual_sup " << format_double(r.residual_sup) << "\n# residual_l2 " << format_double(r.residual_l2)
        << "\n# g_condition " << format_double(r.g_condition) << "\n";
    const Eigen::Index params = r.nodes.empty() ? 0 : r.nodes.front().parameters.size();
    for (Eigen::Index p = 0; p < params; ++p) out << "p" << p + 1 << ',';
    out << "weight,side\n";
    for (const auto& node : r.nodes) {
        if (node.density == 0.0) continue;
        for (Eigen::Index p = 0; p < params; ++p) out << format_double(node.parameters[p]) << ',';
        out << format_double(node.quadrature_weight * std::abs(node.density)) << ','
            << (node.density > 0.0 ? "T2" : "T1") << '\n';
    }
}

void write_csv(std::ostream& out, const PerturbationSearchReport& r)
{
    if (r.winner) {
        out << "# winner";
        for (Eigen::Index i = 0; i < r.winner->rows(); ++i)
            for (Eigen::Index j = 0; j < r.winner->cols(); ++j) out << ' ' << format_double((*r.winner)(i, j));
        out << "\n# distance_to_identity " << format_double(r.distance_to_identity) << '\n';
    } else {
        out << "# winner none\n";
    }
    out << "parameter,order,norm\n";
    for (const auto& s : r.samples) {
        if (s.rejected) continue;
        for (std::size_t m = 0; m < s.norms.size(); ++m)
            out << format_double(s.parameter) << ',' << m << ',' << format_double(s.norms[m]) << '\n';
    }
}

} // namespace univex::io
