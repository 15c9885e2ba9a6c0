// Copyright 2026 The ottopics Authors.
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

// The ottopics command-line tool. Subcommands: train, eval, gen-synth,
// gradcheck, export-embeddings. Exit codes: 0 success, 2 invalid input or
// configuration, 3 numeric failure (including a failed gradient check),
// 4 file I/O.

#ifndef OTTOPICS_TOOLS_CLI_HPP_
#define OTTOPICS_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace ottopics::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Lowercase hex SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace ottopics::cli

#endif  // OTTOPICS_TOOLS_CLI_HPP_
