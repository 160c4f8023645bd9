// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "common.hpp"
#include "wina/version.hpp"

int main(int argc, char** argv) {
    using namespace wina::cli;
    CLI::App app{"wina: weight-informed activation sparsity toolkit"};
    app.set_version_flag("--version", std::string(wina::kVersion));
    app.require_subcommand(1);

    int exit_code = kExitOk;
    register_synth_bench(app, exit_code);
    register_make_net(app, exit_code);
    register_ortho(app, exit_code);
    register_allocate(app, exit_code);
    register_cost(app, exit_code);
    register_gemv_bench(app, exit_code);
    register_verify(app, exit_code);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    return exit_code;
}
