/*
 * Copyright 2026 The ShaTS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "shats/error.h"
#include "shats/predictor.h"

namespace shats {

namespace {

using Clock = std::chrono::steady_clock;

void AppendDouble(std::string& out, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, result.ptr);
}

int RemainingMs(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

class ExternalPredictor : public Predictor {
 public:
  ExternalPredictor(pid_t pid, int to_child, int from_child, int timeout_ms,
                    std::string command)
      : pid_(pid),
        to_child_(to_child),
        from_child_(from_child),
        timeout_ms_(timeout_ms),
        command_(std::move(command)) {}

  ~ExternalPredictor() override { Shutdown(); }

  void Handshake() {
    const std::string line = ReadLine();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      Fail(ErrorCode::kProtocolViolation, "handshake is not JSON: " + Clip(line));
    }
    if (!doc.is_object() || !doc.contains("proto") || !doc.contains("name") ||
        doc.size() != 2 || !doc["proto"].is_number_integer() ||
        doc["proto"].get<std::int64_t>() != 1 || !doc["name"].is_string()) {
      Fail(ErrorCode::kProtocolViolation, "bad handshake: " + Clip(line));
    }
    name_ = doc["name"].get<std::string>();
  }

  std::vector<double> PredictBatch(const WindowBatch& batch) override {
    if (broken_) {
      throw Error(ErrorCode::kPredictorFailure,
                  "external predictor '" + command_ + "' failed earlier");
    }
    const std::uint64_t id = next_id_++;
    std::string request;
    request.reserve(64 + batch.data.size() * 20);
    request += "{\"id\":";
    request += std::to_string(id);
    request += ",\"w\":";
    request += std::to_string(batch.shape.instants);
    request += ",\"f\":";
    request += std::to_string(batch.shape.features);
    request += ",\"windows\":[";
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (i) request += ',';
      request += '[';
      for (int t = 0; t < batch.shape.instants; ++t) {
        if (t) request += ',';
        request += '[';
        for (int f = 0; f < batch.shape.features; ++f) {
          if (f) request += ',';
          AppendDouble(request, batch.At(i, t, f));
        }
        request += ']';
      }
      request += ']';
    }
    request += "]}\n";

    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
    WriteAll(request, deadline);
    const std::string line = ReadLine(deadline);

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      Fail(ErrorCode::kProtocolViolation, "response is not JSON: " + Clip(line));
    }
    if (!doc.is_object() || doc.size() != 2 || !doc.contains("id") ||
        !doc.contains("outputs")) {
      Fail(ErrorCode::kProtocolViolation,
           "response must be {\"id\", \"outputs\"}: " + Clip(line));
    }
    if (!doc["id"].is_number_unsigned() || doc["id"].get<std::uint64_t>() != id) {
      Fail(ErrorCode::kProtocolViolation,
           "response id mismatch, expected " + std::to_string(id) + ": " +
               Clip(line));
    }
    const auto& outputs = doc["outputs"];
    if (!outputs.is_array() || outputs.size() != batch.size()) {
      Fail(ErrorCode::kProtocolViolation,
           "expected " + std::to_string(batch.size()) + " outputs: " + Clip(line));
    }
    std::vector<double> values;
    values.reserve(outputs.size());
    for (const auto& v : outputs) {
      if (!v.is_number()) {
        Fail(ErrorCode::kProtocolViolation, "non-numeric output: " + Clip(line));
      }
      values.push_back(v.get<double>());
    }
    return values;
  }

  bool serial() const override { return true; }
  std::string name() const override {
    return name_.empty() ? "external" : name_;
  }

 private:
  [[noreturn]] void Fail(ErrorCode code, const std::string& message) {
    broken_ = true;
    throw Error(code, "external predictor '" + command_ + "': " + message);
  }

  static std::string Clip(const std::string& line) {
    return line.size() > 120 ? line.substr(0, 120) + "..." : line;
  }

  std::string ReadLine() {
    return ReadLine(Clock::now() + std::chrono::milliseconds(timeout_ms_));
  }

  std::string ReadLine(Clock::time_point deadline) {
    for (;;) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd pfd{from_child_, POLLIN, 0};
      const int ready = poll(&pfd, 1, RemainingMs(deadline));
      if (ready < 0) {
        if (errno == EINTR) continue;
        Fail(ErrorCode::kPredictorFailure,
             std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) {
        Fail(ErrorCode::kTimeout,
             "no response within " + std::to_string(timeout_ms_) + " ms");
      }
      char chunk[65536];
      const ssize_t n = read(from_child_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        Fail(ErrorCode::kPredictorFailure,
             std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        Fail(ErrorCode::kProtocolViolation,
             "child closed its output before completing a line");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void WriteAll(const std::string& data, Clock::time_point deadline) {
    std::size_t written = 0;
    while (written < data.size()) {
      pollfd pfd{to_child_, POLLOUT, 0};
      const int ready = poll(&pfd, 1, RemainingMs(deadline));
      if (ready < 0) {
        if (errno == EINTR) continue;
        Fail(ErrorCode::kPredictorFailure,
             std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) {
        Fail(ErrorCode::kTimeout, "child stopped reading requests");
      }
      const ssize_t n =
          write(to_child_, data.data() + written, data.size() - written);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        Fail(ErrorCode::kPredictorFailure,
             std::string("write failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
  }

  void Shutdown() {
    if (to_child_ >= 0) close(to_child_);
    to_child_ = -1;
    if (pid_ > 0) {
      const auto deadline = Clock::now() + std::chrono::milliseconds(1000);
      int status = 0;
      while (waitpid(pid_, &status, WNOHANG) == 0) {
        if (Clock::now() >= deadline) {
          kill(pid_, SIGKILL);
          waitpid(pid_, &status, 0);
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      }
      pid_ = -1;
    }
    if (from_child_ >= 0) close(from_child_);
    from_child_ = -1;
  }

  pid_t pid_;
  int to_child_;
  int from_child_;
  int timeout_ms_;
  std::string command_;
  std::string name_;
  std::string buffer_;
  std::uint64_t next_id_ = 0;
  bool broken_ = false;
};

}  // namespace

std::unique_ptr<Predictor> SpawnExternalPredictor(
    const std::vector<std::string>& command, int timeout_ms) {
  if (command.empty()) {
    throw Error(ErrorCode::kSpawnFailure, "empty predictor command");
  }
  if (timeout_ms <= 0) {
    throw Error(ErrorCode::kBadParams, "timeout must be positive");
  }
  std::string joined;
  for (const auto& part : command) {
    if (!joined.empty()) joined += ' ';
    joined += part;
  }

  // Writes to a child that died must surface as errors, not kill us.
  signal(SIGPIPE, SIG_IGN);

  int to_child[2];
  int from_child[2];
  int exec_error[2];
  if (pipe2(to_child, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }
  if (pipe2(from_child, O_CLOEXEC) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }
  if (pipe2(exec_error, O_CLOEXEC) != 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
      close(fd);
    }
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }

  std::vector<char*> argv;
  for (const auto& part : command) argv.push_back(const_cast<char*>(part.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) {
    const int err = errno;
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1],
                   exec_error[0], exec_error[1]}) {
      close(fd);
    }
    throw Error(ErrorCode::kSpawnFailure, std::strerror(err));
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    execvp(argv[0], argv.data());
    const int err = errno;
    [[maybe_unused]] ssize_t ignored = write(exec_error[1], &err, sizeof(err));
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);
  close(exec_error[1]);
  int child_errno = 0;
  const ssize_t n = read(exec_error[0], &child_errno, sizeof(child_errno));
  close(exec_error[0]);
  if (n > 0) {
    close(to_child[1]);
    close(from_child[0]);
    waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::kSpawnFailure,
                "cannot execute '" + command.front() + "': " +
                    std::strerror(child_errno));
  }
  fcntl(to_child[1], F_SETFL, fcntl(to_child[1], F_GETFL) | O_NONBLOCK);

  auto predictor = std::make_unique<ExternalPredictor>(
      pid, to_child[1], from_child[0], timeout_ms, joined);
  predictor->Handshake();
  return predictor;
}

}  // namespace shats
