// Copyright 2026 The qpca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "qpca/cli/config.hpp"
#include "qpca/cli/run.hpp"

int main(int argc, char** argv) {
  qpca::cli::RunConfig config;
  CLI::App app{"Statevector simulation of PCA-based quantum data compression"};
  qpca::cli::add_options(app, config);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << qpca::cli::error_object(qpca::ErrorCode::InvalidInput, e.what()).dump() << '\n';
    return qpca::exit_status(qpca::ErrorCode::InvalidInput);
  }
  return qpca::cli::execute(config, std::cerr);
}
