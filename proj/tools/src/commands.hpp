/*
 Copyright 2026 The clmatch Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef CLMATCH_TOOLS_COMMANDS_HPP
#define CLMATCH_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace clmatch::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInvalidConfig = 2,
    kModelLoad = 3,
};

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string location; ///< where the worst value occurred, when meaningful
};

int cmd_synth(const ExperimentConfig &cfg, std::ostream &log);
int cmd_simulate(const ExperimentConfig &cfg, std::ostream &log);
int cmd_verify(const ExperimentConfig &cfg, std::ostream &log);
int cmd_report(const ExperimentConfig &cfg, std::ostream &log);

/// Invariant suite and stability scan against a saved model; also writes scan.csv.
std::vector<CheckResult> run_checks(const ExperimentConfig &cfg, std::ostream &log);

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> stride;
};

/// Resolves the configuration, runs one subcommand and maps errors to exit codes.
int dispatch(const std::string &command, const Overrides &ov, std::ostream &log,
             std::ostream &err);

} // namespace clmatch::cli

#endif // CLMATCH_TOOLS_COMMANDS_HPP
