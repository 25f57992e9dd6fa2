#pragma once

#include <string_view>

// Contents of the files under data/, compiled in by cmake/embed_data.cmake.
namespace crycheck::embedded {

std::string_view passwords();
std::string_view english();
std::string_view names();
std::string_view blacklist();
std::string_view keyboards();

}  // namespace crycheck::embedded
