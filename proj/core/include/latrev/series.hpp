#pragma once

#include <string>
#include <vector>

namespace latrev {

// |⟨ψ(0)|ψ(τ)⟩|² sampled on ascending τ.
struct AutocorrelationSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string source;
};

}  // namespace latrev
