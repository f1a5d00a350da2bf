#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "prisched/priority.hpp"
#include "prisched/scenario.hpp"

namespace prisched {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int error = 1;
inline constexpr int infeasible = 2;
}  // namespace exit_code

struct CommandOptions {
  std::optional<std::string> out_dir;  // overrides [out] dir
  bool quiet = false;
  std::string goal = "stability";      // synth only: stability | delay | randomized
};

/// Policy resolution outcome: a spec to simulate, or the reason it cannot be built.
struct Infeasible {
  std::string reason;
};
std::variant<PrioritySpec, Infeasible> resolve_policy(const Scenario& sc);

int cmd_analyze(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_delay_exponent(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_decompose(const Scenario& sc, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace prisched
