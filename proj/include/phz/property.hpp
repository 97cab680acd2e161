#pragma once

#include <optional>
#include <string_view>

namespace phz {

enum class Property { Assert, Race, Runtime, Deadlock };

inline constexpr Property kAllProperties[] = {Property::Assert, Property::Race, Property::Runtime, Property::Deadlock};

std::string_view to_string(Property p);
std::optional<Property> property_from_string(std::string_view s);

} // namespace phz
