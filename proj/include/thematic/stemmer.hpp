#pragma once

#include <string>
#include <string_view>

namespace thematic {

// Porter (1980) suffix stripper, following the reference C implementation
// including its two known departures ("bli"->"ble", "logi"->"log").
// Input is expected lowercase; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace thematic
