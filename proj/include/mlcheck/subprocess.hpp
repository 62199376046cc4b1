#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace mlcheck {

/// A child process started through `/bin/sh -c "exec <command>"` whose
/// standard input and output are one end of a socket pair. Writes never raise
/// SIGPIPE; reads take a deadline. The destructor kills and reaps the child.
class Subprocess {
 public:
  enum class ReadStatus { ok, timeout, eof };

  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;
  Subprocess(Subprocess&& other) noexcept;
  Subprocess& operator=(Subprocess&& other) noexcept;

  /// Returns false if the child has gone away.
  bool write(std::string_view data);
  /// Signals end of input to the child.
  void close_input();

  /// Reads one line (without the trailing newline).
  ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout);
  /// Reads until EOF. Returns nullopt on timeout; partial output is kept in
  /// `partial`.
  std::optional<std::string> read_all(std::chrono::milliseconds timeout, std::string* partial = nullptr);

  /// Kills the child (if running) and returns its wait status.
  int terminate();
  /// Waits up to `grace` for a voluntary exit before killing.
  int finish(std::chrono::milliseconds grace);

  bool running() const { return pid_ > 0; }
  /// Exit code if the child exited normally, -1 otherwise. Valid after
  /// terminate()/finish().
  int exit_code() const { return exit_code_; }

 private:
  ReadStatus fill(std::chrono::steady_clock::time_point deadline);
  void reap(int status);

  pid_t pid_ = -1;
  int fd_ = -1;
  bool input_closed_ = false;
  std::string buffer_;
  int exit_code_ = -1;
};

}  // namespace mlcheck
