#pragma once

#include "csmw/model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace csmw_test {

inline std::string model_path(const std::string& name) { return std::string(CSMW_MODELS_DIR) + "/" + name; }
inline std::string golden_path(const std::string& name) { return std::string(CSMW_GOLDEN_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline csmw::SystemModel load_model(const std::string& name) { return csmw::parse_model(slurp(model_path(name))); }

} // namespace csmw_test
