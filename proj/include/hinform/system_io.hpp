#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hinform/matrix.hpp"

namespace hinform {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// JSON system file: dimensions n, d plus exactly one of a matrix pair
/// {"A", "B"} or an angle list {"thetas"}; an optional observation matrix
/// "C". Matrices are nested row arrays (a flat row-major array of the right
/// length is also accepted on input).
struct SystemFile {
    std::size_t n = 0;
    std::size_t d = 0;
    std::optional<Matrix> a;
    std::optional<Matrix> b;
    std::optional<Matrix> c;
    std::optional<std::vector<double>> thetas;

    bool has_matrices() const { return a.has_value() && b.has_value(); }
    bool has_angles() const { return thetas.has_value(); }
};

SystemFile parse_system(const nlohmann::json& doc);
SystemFile load_system(std::istream& in);
SystemFile load_system_file(const std::string& path);

nlohmann::ordered_json matrix_to_json(const Matrix& m);
nlohmann::ordered_json system_to_json(const SystemFile& file);

}  // namespace hinform
