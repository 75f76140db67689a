#include "annc/curve_file.hpp"

#include "annc/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>

namespace annc {

using json = nlohmann::json;

curve parse_curve_line(const std::string& text, std::size_t line) {
    json rec;
    try {
        rec = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(line, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) {
        throw parse_error(line, "record must be a JSON object");
    }
    auto id = rec.find("id");
    if (id == rec.end() || !id->is_string()) {
        throw parse_error(line, "record needs a string \"id\"");
    }
    auto pts = rec.find("points");
    if (pts == rec.end() || !pts->is_array() || pts->empty()) {
        throw parse_error(line, "record needs a non-empty \"points\" array");
    }
    std::size_t dim = 0;
    std::vector<double> coords;
    for (const auto& p : *pts) {
        if (!p.is_array() || p.empty()) {
            throw parse_error(line, "each point must be a non-empty array of numbers");
        }
        if (dim == 0) {
            dim = p.size();
        } else if (p.size() != dim) {
            throw parse_error(line, "points of one curve must share a dimension");
        }
        for (const auto& x : p) {
            if (!x.is_number()) {
                throw parse_error(line, "coordinates must be numbers");
            }
            coords.push_back(x.get<double>());
        }
    }
    try {
        return curve(id->get<std::string>(), dim, std::move(coords));
    } catch (const error& e) {
        throw parse_error(line, e.what());
    }
}

void for_each_curve_line(std::istream& is,
                         const std::function<void(std::size_t, const std::string&)>& f) {
    std::string text;
    std::size_t line = 0;
    while (std::getline(is, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        f(line, text);
    }
}

std::vector<curve> read_curves(std::istream& is) {
    std::vector<curve> out;
    for_each_curve_line(is, [&](std::size_t line, const std::string& text) {
        auto c = parse_curve_line(text, line);
        if (!out.empty() && c.dim() != out.front().dim()) {
            throw parse_error(line, "dimension " + std::to_string(c.dim()) +
                                        " differs from the file's " +
                                        std::to_string(out.front().dim()));
        }
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<curve> read_curves(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw format_error("cannot open '" + path.string() + "'");
    }
    return read_curves(is);
}

void write_curve_line(std::ostream& os, const curve& c) {
    json pts = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto v = c.vertex(i);
        pts.push_back(std::vector<double>(v.begin(), v.end()));
    }
    os << json{{"id", c.id()}, {"points", pts}}.dump() << '\n';
}

} // namespace annc
