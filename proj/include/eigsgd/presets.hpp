#pragma once

#include <string>
#include <vector>

#include "eigsgd/config.hpp"

namespace eigsgd {

/// desk shrinks the two large figures (fig4, fig8) to 1000x300 with 1e5
/// iterations, keeping the spectrum range. Every other preset is identical at
/// both scales.
enum class Scale { desk, paper };

std::string to_string(Scale s);
Scale parse_scale(const std::string& text);

/// fig1 .. fig8.
const std::vector<std::string>& preset_names();

/// Throws std::invalid_argument for an unknown name.
ExperimentConfig preset(const std::string& name, Scale scale = Scale::desk);

/// Residual size used by the inconsistent presets (fig3, fig6), relative to ||A x_true||.
inline constexpr double kPresetNoiseLevel = 0.5;

}  // namespace eigsgd
