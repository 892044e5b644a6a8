#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rstorm/errors.hpp"
#include "rstorm/resources.hpp"

namespace rstorm::detail {

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInput("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline void write_json_file(const Json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MissingInput("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    return it->template get<T>();
}

}  // namespace rstorm::detail
