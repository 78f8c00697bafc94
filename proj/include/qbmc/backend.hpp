// ============================================================================
// qbmc/backend.hpp — solver clients: external process driver and built-in
// ============================================================================
//
// run_solver feeds SMT-LIB2 text to an external solver process on stdin,
// reads the verdict token and optional model block from stdout, enforces the
// timeout (kill + reap, no orphans) and reports wall time plus the child's
// peak RSS where the OS provides it. solve_builtin runs the bundled solver
// in-process. run_check dispatches on the configured command; the default
// comes from QBMC_SOLVER, falling back to the built-in solver.
//
// ============================================================================

#ifndef QBMC_BACKEND_HPP
#define QBMC_BACKEND_HPP

#include "qbmc/smtlib.hpp"
#include "qbmc/solver/smtsolver.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

namespace qbmc {

enum class Status { Sat, Unsat, Unknown, Timeout, Error };

inline const char* status_text(Status s) {
    switch (s) {
        case Status::Sat: return "SAT";
        case Status::Unsat: return "UNSAT";
        case Status::Unknown: return "UNKNOWN";
        case Status::Timeout: return "TIMEOUT";
        case Status::Error: return "ERROR";
    }
    return "?";
}

struct SolverVerdict {
    Status status = Status::Error;
    std::optional<Assignment> model;
    std::string solver_stdout_tail;
    double wall_time_seconds = 0.0;
    std::optional<std::uint64_t> peak_memory_bytes;
};

namespace detail {

inline void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

inline std::vector<std::string> split_command(const std::string& cmd) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : cmd) {
        if (c == ' ' || c == '\t') {
            if (!cur.empty()) parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(std::move(cur));
    return parts;
}

inline std::string tail_of(const std::string& s, std::size_t n = 4000) {
    if (s.size() <= n) return s;
    return s.substr(s.size() - n);
}

} // namespace detail

// Runs `solver_cmd` with the rendered script on stdin. The first
// sat/unsat/unknown token on stdout decides the status; on sat with models
// requested the following s-expression is parsed into an Assignment.
inline SolverVerdict run_solver(const Script& script, const std::string& solver_cmd,
                                std::chrono::milliseconds timeout) {
    detail::ignore_sigpipe_once();
    SolverVerdict verdict;
    const std::string input = to_smtlib2(script);
    auto argv_strings = detail::split_command(solver_cmd);
    if (argv_strings.empty()) {
        verdict.status = Status::Error;
        verdict.solver_stdout_tail = "empty solver command";
        return verdict;
    }
    std::vector<char*> argv;
    for (auto& s : argv_strings) argv.push_back(s.data());
    argv.push_back(nullptr);

    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
        verdict.status = Status::Error;
        verdict.solver_stdout_tail = std::string("pipe: ") + std::strerror(errno);
        return verdict;
    }

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        verdict.status = Status::Error;
        verdict.solver_stdout_tail = std::string("fork: ") + std::strerror(errno);
        return verdict;
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execvp(argv[0], argv.data());
        const char* msg = "exec failed\n";
        ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
        (void)ignored;
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);

    std::string output;
    std::size_t written = 0;
    bool stdin_open = true;
    bool timed_out = false;
    auto deadline = timeout.count() > 0 ? start + timeout
                                        : std::chrono::steady_clock::time_point::max();

    while (true) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        int out_idx = -1, in_idx = -1;
        fds[nfds] = {out_pipe[0], POLLIN, 0};
        out_idx = static_cast<int>(nfds++);
        if (stdin_open) {
            fds[nfds] = {in_pipe[1], POLLOUT, 0};
            in_idx = static_cast<int>(nfds++);
        }
        int wait_ms = 100;
        if (deadline != std::chrono::steady_clock::time_point::max()) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
            if (left <= 0) {
                timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(std::min<long long>(left, 100));
        }
        int rc = poll(fds, nfds, wait_ms);
        if (rc < 0 && errno != EINTR) break;
        bool out_closed = false;
        if (rc > 0) {
            if (fds[out_idx].revents & (POLLIN | POLLHUP)) {
                char buf[65536];
                ssize_t n;
                while ((n = read(out_pipe[0], buf, sizeof buf)) > 0)
                    output.append(buf, static_cast<std::size_t>(n));
                if (n == 0) out_closed = true;
            }
            if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
                if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
                    close(in_pipe[1]);
                    stdin_open = false;
                } else {
                    ssize_t n = write(in_pipe[1], input.data() + written,
                                      std::min<std::size_t>(65536, input.size() - written));
                    if (n > 0) written += static_cast<std::size_t>(n);
                    if (n < 0 && errno != EAGAIN && errno != EINTR) {
                        close(in_pipe[1]);
                        stdin_open = false;
                    }
                    if (written == input.size()) {
                        close(in_pipe[1]);
                        stdin_open = false;
                    }
                }
            }
        }
        if (out_closed) break;
    }

    if (stdin_open) close(in_pipe[1]);
    if (timed_out) killpg(pid, SIGKILL);

    int status = 0;
    struct rusage usage{};
    wait4(pid, &status, 0, &usage);
    // drain anything written before the kill
    {
        char buf[65536];
        ssize_t n;
        while ((n = read(out_pipe[0], buf, sizeof buf)) > 0)
            output.append(buf, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);

    verdict.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (usage.ru_maxrss > 0)
        verdict.peak_memory_bytes = static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
    verdict.solver_stdout_tail = detail::tail_of(output);

    if (timed_out) {
        verdict.status = Status::Timeout;
        return verdict;
    }

    // first standalone verdict token
    std::size_t verdict_end = std::string::npos;
    {
        std::size_t pos = 0;
        while (pos < output.size()) {
            std::size_t end = output.find_first_of(" \t\r\n", pos);
            if (end == std::string::npos) end = output.size();
            std::string token = output.substr(pos, end - pos);
            if (token == "sat") {
                verdict.status = Status::Sat;
                verdict_end = end;
                break;
            }
            if (token == "unsat") {
                verdict.status = Status::Unsat;
                verdict_end = end;
                break;
            }
            if (token == "unknown") {
                verdict.status = Status::Unknown;
                verdict_end = end;
                break;
            }
            pos = output.find_first_not_of(" \t\r\n", end);
            if (pos == std::string::npos) break;
        }
    }
    if (verdict_end == std::string::npos) {
        verdict.status = Status::Error;
        if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
            verdict.solver_stdout_tail =
                "exit " + std::to_string(WEXITSTATUS(status)) + ": " + verdict.solver_stdout_tail;
        return verdict;
    }

    if (verdict.status == Status::Sat && script.produce_models) {
        std::size_t open = output.find('(', verdict_end);
        if (open != std::string::npos) {
            try {
                verdict.model = parse_smt_model(output.substr(open), script);
            } catch (const SmtlibError& e) {
                verdict.status = Status::Error;
                verdict.solver_stdout_tail =
                    std::string("model parse: ") + e.what() + "\n" + detail::tail_of(output);
            }
        }
    }
    return verdict;
}

// In-process solving with the bundled solver.
inline SolverVerdict solve_builtin(const Script& script, std::chrono::milliseconds timeout) {
    SolverVerdict verdict;
    auto start = std::chrono::steady_clock::now();
    smt::SolveLimits limits;
    limits.timeout = timeout;
    smt::SolveResult r = smt::solve_script(script, limits);
    verdict.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    switch (r.status) {
        case smt::SolveStatus::Sat:
            verdict.status = Status::Sat;
            if (script.produce_models) verdict.model = std::move(r.model);
            break;
        case smt::SolveStatus::Unsat: verdict.status = Status::Unsat; break;
        case smt::SolveStatus::Unknown: verdict.status = Status::Unknown; break;
        case smt::SolveStatus::Timeout: verdict.status = Status::Timeout; break;
    }
    verdict.solver_stdout_tail = r.comment;
    return verdict;
}

struct SolverConfig {
    std::string command;  // empty or "builtin": in-process
    std::chrono::milliseconds timeout{0};
};

inline SolverConfig default_solver_config() {
    SolverConfig cfg;
    if (const char* env = std::getenv("QBMC_SOLVER")) cfg.command = env;
    return cfg;
}

inline SolverVerdict run_check(const Script& script, const SolverConfig& cfg) {
    if (cfg.command.empty() || cfg.command == "builtin")
        return solve_builtin(script, cfg.timeout);
    return run_solver(script, cfg.command, cfg.timeout);
}

} // namespace qbmc

#endif // QBMC_BACKEND_HPP
