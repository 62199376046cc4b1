#include "mlcheck/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "mlcheck/error.hpp"

namespace mlcheck {

Subprocess::Subprocess(const std::string& command) {
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(std::string("socketpair failed: ") + std::strerror(errno));
  }
  std::string script = "exec " + command;
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw Error(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    signal(SIGPIPE, SIG_DFL);
    execl("/bin/sh", "sh", "-c", script.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  pid_ = pid;
  fd_ = fds[0];
}

Subprocess::~Subprocess() { terminate(); }

Subprocess::Subprocess(Subprocess&& other) noexcept
    : pid_(other.pid_),
      fd_(other.fd_),
      input_closed_(other.input_closed_),
      buffer_(std::move(other.buffer_)),
      exit_code_(other.exit_code_) {
  other.pid_ = -1;
  other.fd_ = -1;
}

Subprocess& Subprocess::operator=(Subprocess&& other) noexcept {
  if (this != &other) {
    terminate();
    pid_ = other.pid_;
    fd_ = other.fd_;
    input_closed_ = other.input_closed_;
    buffer_ = std::move(other.buffer_);
    exit_code_ = other.exit_code_;
    other.pid_ = -1;
    other.fd_ = -1;
  }
  return *this;
}

bool Subprocess::write(std::string_view data) {
  if (fd_ < 0 || input_closed_) return false;
  while (!data.empty()) {
    ssize_t n = send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

void Subprocess::close_input() {
  if (fd_ >= 0 && !input_closed_) {
    shutdown(fd_, SHUT_WR);
    input_closed_ = true;
  }
}

Subprocess::ReadStatus Subprocess::fill(std::chrono::steady_clock::time_point deadline) {
  if (fd_ < 0) return ReadStatus::eof;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() < 0) return ReadStatus::timeout;
    pollfd p{fd_, POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::eof;
    }
    if (r == 0) return ReadStatus::timeout;
    char chunk[8192];
    ssize_t n = recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::eof;
    }
    if (n == 0) return ReadStatus::eof;
    buffer_.append(chunk, static_cast<std::size_t>(n));
    return ReadStatus::ok;
  }
}

Subprocess::ReadStatus Subprocess::read_line(std::string& line, std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      buffer_.erase(0, nl + 1);
      return ReadStatus::ok;
    }
    auto status = fill(deadline);
    if (status != ReadStatus::ok) {
      if (status == ReadStatus::eof && !buffer_.empty()) {
        line = std::move(buffer_);
        buffer_.clear();
        return ReadStatus::ok;
      }
      return status;
    }
  }
}

std::optional<std::string> Subprocess::read_all(std::chrono::milliseconds timeout, std::string* partial) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto status = fill(deadline);
    if (status == ReadStatus::eof) {
      std::string out = std::move(buffer_);
      buffer_.clear();
      return out;
    }
    if (status == ReadStatus::timeout) {
      if (partial) *partial = buffer_;
      return std::nullopt;
    }
  }
}

void Subprocess::reap(int status) {
  exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  pid_ = -1;
  if (fd_ >= 0) {
    close(fd_);
    fd_ = -1;
  }
}

int Subprocess::terminate() {
  if (pid_ <= 0) {
    if (fd_ >= 0) {
      close(fd_);
      fd_ = -1;
    }
    return exit_code_;
  }
  int status = 0;
  pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
  reap(status);
  return exit_code_;
}

int Subprocess::finish(std::chrono::milliseconds grace) {
  if (pid_ <= 0) return exit_code_;
  close_input();
  auto deadline = std::chrono::steady_clock::now() + grace;
  int status = 0;
  while (std::chrono::steady_clock::now() < deadline) {
    pid_t r = waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      reap(status);
      return exit_code_;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return terminate();
}

}  // namespace mlcheck
