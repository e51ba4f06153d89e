#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isus/sus.hpp"

namespace isus {

// External performance models run as a child process: one whitespace-
// separated parameter vector per input line, one g-value per output line.
// A fresh child is spawned per batch so the contract stays stateless.
class SubprocessModel {
 public:
  explicit SubprocessModel(std::string command, std::size_t batch_size = 1000)
      : command_(std::move(command)), batch_size_(std::max<std::size_t>(batch_size, 1)) {}

  std::vector<double> evaluate(const std::vector<std::vector<double>>& points) const {
    std::vector<double> out;
    out.reserve(points.size());
    for (std::size_t b = 0; b < points.size(); b += batch_size_) {
      std::size_t e = std::min(b + batch_size_, points.size());
      run_batch(points, b, e, out);
    }
    return out;
  }

  // Adapter for the SuS engine; batching degenerates to one call per point
  // inside MCMC levels, which is the honest cost of a streaming contract.
  PerformanceFn as_performance_fn() const {
    return [this](const std::vector<double>& x) {
      std::vector<std::vector<double>> one{x};
      return evaluate(one).at(0);
    };
  }

 private:
  void run_batch(const std::vector<std::vector<double>>& points, std::size_t b,
                 std::size_t e, std::vector<double>& out) const {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw std::runtime_error("subprocess model: pipe failed");
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("subprocess model: fork failed");
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);

    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < points[i].size(); ++j)
        ss << (j ? " " : "") << points[i][j];
      ss << "\n";
    }
    std::string payload = ss.str();
    const char* p = payload.data();
    std::size_t left = payload.size();
    while (left > 0) {
      ssize_t w = write(in_pipe[1], p, left);
      if (w < 0) {
        if (errno == EINTR) continue;
        break;
      }
      p += w;
      left -= static_cast<std::size_t>(w);
    }
    close(in_pipe[1]);

    std::string reply;
    char buf[4096];
    for (;;) {
      ssize_t r = read(out_pipe[0], buf, sizeof(buf));
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) break;
      reply.append(buf, static_cast<std::size_t>(r));
    }
    close(out_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      throw std::runtime_error("subprocess model exited with failure: " + command_);

    std::istringstream rs(reply);
    double g;
    std::size_t count = 0;
    while (rs >> g && count < e - b) {
      out.push_back(g);
      ++count;
    }
    if (count != e - b)
      throw std::runtime_error("subprocess model: expected " + std::to_string(e - b) +
                               " values, got " + std::to_string(count));
  }

  std::string command_;
  std::size_t batch_size_;
};

}  // namespace isus
