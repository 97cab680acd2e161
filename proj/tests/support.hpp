#pragma once

#include "phz/lang.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace phz::test {

inline std::string corpus_path(const std::string& name)
{
    return std::string(PHZ_CORPUS_DIR) + "/" + name;
}

inline Program load(const std::string& name)
{
    return parse_file(corpus_path(name));
}

inline std::vector<std::string> corpus_files()
{
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(PHZ_CORPUS_DIR))
        if (e.path().extension() == ".phz")
            out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace phz::test
