#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "latrev/config.hpp"
#include "latrev/output.hpp"

namespace latrev::recipes {

struct Panel {
  std::string label;
  config::RunConfig config;
};

// A figure analogue: the bundled configurations of its panels and the
// qualitative checks it performs on their output.
struct FigureRecipe {
  std::string name;
  std::string summary;
  std::vector<Panel> panels;
  std::vector<std::string> checks;
};

const std::vector<std::string>& recipe_names();

// Scaled-down durations unless `full` is set. Unknown names raise
// Error{InvalidInput} listing the available recipes.
FigureRecipe make_recipe(const std::string& name, bool full = false);

struct RecipeOptions {
  std::filesystem::path out_dir;
  unsigned threads = 0;
  bool full = false;
};

struct RecipeResult {
  std::string name;
  std::filesystem::path manifest;
  std::vector<output::Assertion> assertions;
  bool passed = false;
};

// Writes every output plus manifest.json into out_dir. Failed checks are
// recorded in the manifest; the caller decides the exit status.
RecipeResult run_recipe(const std::string& name, const RecipeOptions& options);

}  // namespace latrev::recipes
