// Copyright 2026 The ttakit Authors
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

#pragma once

// Line protocol with a predictor running as a child process (POSIX only).
//
//   harness -> child   PREDICT <image_id> <transform_id> <path-to-ppm>\n
//   child -> harness   <class_count space-separated decimal floats>\n
//   harness -> child   END\n                 (once, at shutdown)
//
// Reply lines are numbered from 1 in error messages.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ttakit/error.hpp"
#include "ttakit/ppm.hpp"
#include "ttakit/predictor.hpp"

namespace ttakit {

/// Parses one reply line into exactly `classes` floats.
inline ProbVector parse_prediction_line(std::string_view line, std::size_t classes,
                                        std::size_t line_no) {
  ProbVector out;
  out.reserve(classes);
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (;;) {
    while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    float v = 0.0f;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (next != end && *next != ' ' && *next != '\t' && *next != '\r')) {
      throw ProtocolError(line_no, "cannot parse '" + std::string(line) + "' as floats");
    }
    out.push_back(v);
    p = next;
  }
  if (out.size() != classes) {
    throw ProtocolError(line_no, "expected " + std::to_string(classes) + " values, got " +
                                     std::to_string(out.size()));
  }
  return out;
}

class ExternalProcessPredictor final : public Predictor {
 public:
  /// Starts `/bin/sh -c command`. Patches are written as PPM files under
  /// `work_dir` before each request.
  ExternalProcessPredictor(const std::string& command, std::size_t classes,
                           std::filesystem::path work_dir)
      : classes_(classes), work_dir_(std::move(work_dir)) {
    std::filesystem::create_directories(work_dir_);
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw IoError("pipe failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw IoError("pipe failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw IoError("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_ = fdopen(to_child[1], "w");
    from_ = fdopen(from_child[0], "r");
    if (to_ == nullptr || from_ == nullptr) throw IoError("fdopen failed");
    // A child that exits early must surface as a protocol error, not SIGPIPE.
    signal(SIGPIPE, SIG_IGN);
  }

  ExternalProcessPredictor(const ExternalProcessPredictor&) = delete;
  ExternalProcessPredictor& operator=(const ExternalProcessPredictor&) = delete;

  ~ExternalProcessPredictor() override { shutdown(); }

  std::size_t class_count() const override { return classes_; }

  std::vector<ProbVector> predict_batch(std::span<const PatchRequest> patches) override {
    std::vector<ProbVector> out;
    out.reserve(patches.size());
    for (const auto& p : patches) {
      const auto path = work_dir_ / (std::string(p.image_id) + "_" +
                                     std::to_string(p.transform_id) + ".ppm");
      write_ppm_file(path, *p.patch);
      const std::string request = "PREDICT " + std::string(p.image_id) + " " +
                                  std::to_string(p.transform_id) + " " + path.string() + "\n";
      if (std::fputs(request.c_str(), to_) < 0 || std::fflush(to_) != 0) {
        throw ProtocolError(lines_ + 1, "predictor closed its input");
      }
      out.push_back(parse_prediction_line(read_line(), classes_, lines_));
      std::filesystem::remove(path);
    }
    return out;
  }

  /// Sends END and waits for the child. Returns its exit status.
  int shutdown() {
    if (pid_ <= 0) return status_;
    if (to_ != nullptr) {
      std::fputs("END\n", to_);
      std::fclose(to_);
      to_ = nullptr;
    }
    if (from_ != nullptr) {
      std::fclose(from_);
      from_ = nullptr;
    }
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return status_;
  }

 private:
  std::string read_line() {
    std::string line;
    int ch = 0;
    while ((ch = std::fgetc(from_)) != EOF && ch != '\n') line.push_back(static_cast<char>(ch));
    ++lines_;
    if (ch == EOF && line.empty()) throw ProtocolError(lines_, "predictor closed its output");
    return line;
  }

  std::size_t classes_;
  std::filesystem::path work_dir_;
  pid_t pid_ = -1;
  std::FILE* to_ = nullptr;
  std::FILE* from_ = nullptr;
  std::size_t lines_ = 0;
  int status_ = 0;
};

}  // namespace ttakit
