#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <string>
#include <vector>

#include "gsbench/campaign.hpp"

namespace gsbench {

// Bridges the proposer protocol to an external command over line-delimited
// JSON on stdin/stdout. Per iteration the harness sends
//   {"archive_tail": [last <= 10 records], "best_protocol": {...}}
// and expects {"payload": {...}, "summary": "..."} within 30 seconds.
// Timeouts, EOF, and malformed replies fail that iteration only.
class ExternalProposer : public Proposer {
 public:
  explicit ExternalProposer(const std::string& command, int timeout_ms = 30000)
      : timeout_ms_(timeout_ms) {
    signal(SIGPIPE, SIG_IGN);  // dead proposers surface as write errors
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw EvaluationError("cannot create proposer pipes");
    pid_ = fork();
    if (pid_ < 0) throw EvaluationError("cannot fork external proposer");
    if (pid_ == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    fcntl(from_child_, F_SETFL, O_NONBLOCK);
  }

  ~ExternalProposer() override {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  ExternalProposer(const ExternalProposer&) = delete;
  ExternalProposer& operator=(const ExternalProposer&) = delete;

  std::optional<Proposal> propose(const CampaignArchive& archive, const Protocol& best) override {
    json tail = json::array();
    const std::size_t n = archive.records.size();
    for (std::size_t i = n > 10 ? n - 10 : 0; i < n; ++i)
      tail.push_back(record_to_json(archive.records[i]));
    const std::string request =
        json{{"archive_tail", tail}, {"best_protocol", protocol_to_json(best)}}.dump() + "\n";
    if (!write_all(request)) return std::nullopt;

    std::string line;
    if (!read_line(line)) return std::nullopt;
    try {
      const json reply = json::parse(line);
      check_keys(reply, {"payload", "summary"}, "external proposal");
      Proposal p;
      p.protocol = best;
      payload_from_json(p.protocol, require_key(reply, "payload", "external proposal"));
      p.summary = get_or<std::string>(reply, "summary", "external candidate");
      return p;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

 private:
  bool write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  bool read_line(std::string& line) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return false;
      const int remaining = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      struct pollfd pfd {from_child_, POLLIN, 0};
      const int pr = poll(&pfd, 1, std::max(1, remaining));
      if (pr <= 0) return false;
      char chunk[4096];
      const ssize_t n = read(from_child_, chunk, sizeof(chunk));
      if (n <= 0) return false;  // EOF or error
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

}  // namespace gsbench
