/*
 * Copyright 2026 The Blindspot Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blindspot {

/// A child process with piped stdin/stdout (stderr is inherited), read and
/// written line by line.
class ChildProcess {
 public:
  /// Throws DetectorError when the program cannot be spawned.
  explicit ChildProcess(const std::vector<std::string>& argv);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Throws ProcessExit when the child has closed its end.
  void write_line(std::string_view line);
  /// Next line without the trailing newline; nullopt on end of stream.
  /// Throws Timeout.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);

  /// Reaps the child if it exited; returns its exit status (128+signal for
  /// signals) or nullopt while it runs.
  std::optional<int> poll_exit();
  /// Exit status, waiting up to `grace` before killing it.
  int terminate(std::chrono::milliseconds grace);

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
  std::optional<int> exit_status_;
};

}  // namespace blindspot
