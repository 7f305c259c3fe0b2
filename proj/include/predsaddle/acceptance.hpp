#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace predsaddle {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Names in suite order.
const std::vector<std::string>& acceptance_criteria_names();

// Runs the listed criteria (all when `only` is empty), printing one pass/fail
// line per criterion to `out`. Scratch files (determinism reruns) go under
// `scratch_dir`. Throws std::invalid_argument for an unknown criterion name.
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& only,
                                            const std::filesystem::path& scratch_dir,
                                            std::ostream& out);

}  // namespace predsaddle
