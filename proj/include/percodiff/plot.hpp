#pragma once

#include <string>
#include <string_view>

namespace percodiff {

/// Log-log SVG of a criteria or escape CSV: ladder values per criterion, or
/// escape means with error bars, against log10(1/epsilon). A pure function of
/// the input bytes. Throws ConfigError when the header matches neither schema.
std::string emit_plot(std::string_view csv);

}  // namespace percodiff
