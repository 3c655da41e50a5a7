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

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Energy-shaping controller synthesis with an RBF-blended controlled inertia"};
    app.require_subcommand(1);

    clmatch::cli::Overrides ov;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int stride = 0;

    for (const char *name : {"synth", "simulate", "verify", "report"}) {
        auto *sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON experiment configuration")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "random seed for sampled checks");
        sub->add_option("--stride", stride, "record every n-th integration step")
            ->check(CLI::PositiveNumber);
    }
    app.get_subcommand("synth")->description("fit the controlled inertia and save the model");
    app.get_subcommand("simulate")->description("closed-loop runs and the Vc surface as CSV");
    app.get_subcommand("verify")->description("invariant suite and Lyapunov scan");
    app.get_subcommand("report")->description("summary of the model and previous outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : clmatch::cli::kInvalidConfig;
    }

    const CLI::App *sub = app.get_subcommands().front();
    if (sub->count("--config") > 0) ov.config_path = config;
    if (sub->count("--out") > 0) ov.out = out;
    if (sub->count("--seed") > 0) ov.seed = seed;
    if (sub->count("--stride") > 0) ov.stride = stride;
    return clmatch::cli::dispatch(sub->get_name(), ov, std::cout, std::cerr);
}
