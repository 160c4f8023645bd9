// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <iostream>

#include "wina/errors.hpp"

namespace wina::cli {

template <class F>
int guarded(const char* command, F&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        std::cerr << "wina " << command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "wina " << command << ": invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "wina " << command << ": " << e.what() << '\n';
        return kExitVerifyFailed;
    }
}

} // namespace wina::cli
