#pragma once

#include <string>

#include "sslmseg/postprocess.hpp"

namespace sslmseg {

/// Line plot of precision, recall and F against the threshold, both axes
/// fixed to [0, 1], with a marker at the optimum.
std::string sweep_svg(const SweepResult& result, const std::string& title);

}  // namespace sslmseg
