#include "hinform/system_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>

namespace hinform {

namespace {

using nlohmann::json;

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(where + ": number is not finite");
    return x;
}

std::size_t dimension_at(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw ParseError("missing \"" + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
        throw ParseError("\"" + key + "\" must be a positive integer");
    return v.get<std::size_t>();
}

Matrix matrix_at(const json& doc, const std::string& key, std::size_t rows, std::size_t cols) {
    const json& v = doc.at(key);
    std::vector<double> data;
    data.reserve(rows * cols);
    if (v.is_array() && !v.empty() && v.front().is_array()) {
        if (v.size() != rows) throw ParseError("\"" + key + "\": expected " +
                                               std::to_string(rows) + " rows");
        for (const json& row : v) {
            if (!row.is_array() || row.size() != cols)
                throw ParseError("\"" + key + "\": expected rows of length " +
                                 std::to_string(cols));
            for (const json& x : row) data.push_back(number_at(x, key));
        }
    } else if (v.is_array()) {
        if (v.size() != rows * cols)
            throw ParseError("\"" + key + "\": expected " + std::to_string(rows * cols) +
                             " entries");
        for (const json& x : v) data.push_back(number_at(x, key));
    } else {
        throw ParseError("\"" + key + "\": expected an array");
    }
    return Matrix::from_data(rows, cols, std::move(data));
}

}  // namespace

SystemFile parse_system(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("system file must be a JSON object");
    SystemFile file;
    file.n = dimension_at(doc, "n");
    file.d = dimension_at(doc, "d");

    const bool has_pair = doc.contains("A") || doc.contains("B");
    const bool has_angles = doc.contains("thetas");
    if (has_pair && has_angles)
        throw ParseError("provide either {A, B} or {thetas}, not both");
    if (!has_pair && !has_angles)
        throw ParseError("provide either {A, B} or {thetas}");

    if (has_pair) {
        if (!doc.contains("A") || !doc.contains("B"))
            throw ParseError("matrix form requires both \"A\" and \"B\"");
        file.a = matrix_at(doc, "A", file.n, file.n);
        file.b = matrix_at(doc, "B", file.n, file.d);
    } else {
        const json& v = doc.at("thetas");
        if (!v.is_array() || v.size() != file.n * file.d)
            throw ParseError("\"thetas\": expected " + std::to_string(file.n * file.d) +
                             " angles");
        std::vector<double> thetas;
        thetas.reserve(v.size());
        for (const json& x : v) thetas.push_back(number_at(x, "thetas"));
        file.thetas = std::move(thetas);
    }

    if (doc.contains("C")) {
        const json& v = doc.at("C");
        if (!v.is_array() || v.empty()) throw ParseError("\"C\": expected a nonempty array");
        const std::size_t p = v.front().is_array() ? v.size() : 1;
        file.c = matrix_at(doc, "C", p, file.n);
    }
    return file;
}

SystemFile load_system(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        return parse_system(doc);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid system file: ") + e.what());
    }
}

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    return load_system(in);
}

nlohmann::ordered_json matrix_to_json(const Matrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::ordered_json system_to_json(const SystemFile& file) {
    nlohmann::ordered_json doc;
    doc["n"] = file.n;
    doc["d"] = file.d;
    if (file.thetas) doc["thetas"] = *file.thetas;
    if (file.a) doc["A"] = matrix_to_json(*file.a);
    if (file.b) doc["B"] = matrix_to_json(*file.b);
    if (file.c) doc["C"] = matrix_to_json(*file.c);
    return doc;
}

}  // namespace hinform
