#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctiv::util {

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
bool iequals(std::string_view a, std::string_view b);

}  // namespace ctiv::util
