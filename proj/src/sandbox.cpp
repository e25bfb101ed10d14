#include "sciagent/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sciagent/csv.hpp"

extern char** environ;

namespace sciagent::sandbox {

std::string to_string(ExecStatus s) {
    switch (s) {
        case ExecStatus::ok: return "ok";
        case ExecStatus::nonzero_exit: return "nonzero_exit";
        case ExecStatus::timeout: return "timeout";
        case ExecStatus::spawn_failure: return "spawn_failure";
    }
    return "?";
}

void ExecutionLimits::validate() const {
    if (!(wall_timeout_s > 0)) throw Error("sandbox: wall_timeout must be positive");
    if (workspace.empty()) throw Error("sandbox: no workspace path");
    if (interpreter_cmd.find("{file}") == std::string::npos)
        throw Error("sandbox: interpreter command lacks {file} slot");
}

namespace {

// {file} expands to the bare filename: the child runs with the workspace as
// its cwd, and relative paths keep interpreter diagnostics (tracebacks)
// byte-identical across replays in different workspaces.
std::vector<std::string> build_argv(const ExecutionLimits& limits) {
    std::vector<std::string> argv;
    std::string tok;
    std::istringstream in(limits.interpreter_cmd);
    while (in >> tok) {
        if (tok == "{file}")
            argv.push_back(limits.code_filename);
        else
            argv.push_back(tok);
    }
    return argv;
}

std::vector<std::string> build_env(const ExecutionLimits& limits) {
    std::vector<std::string> env;
    for (const auto& key : limits.env_allowlist) {
        if (const char* v = ::getenv(key.c_str())) env.push_back(key + "=" + v);
    }
    return env;
}

struct CaptureBuffer {
    std::string text;
    std::size_t cap;
    std::size_t total = 0;

    void feed(const char* data, std::size_t n) {
        total += n;
        if (text.size() < cap) text.append(data, std::min(n, cap - text.size()));
    }
    void finish() {
        if (total > text.size())
            text += "\n[output truncated at " + std::to_string(text.size()) + " bytes]\n";
    }
};

}  // namespace

ExecutionResult execute(const std::string& code, const ExecutionLimits& limits) {
    limits.validate();

    namespace fs = std::filesystem;
    fs::create_directories(limits.workspace);
    for (const auto& entry : fs::directory_iterator(limits.workspace)) {
        (void)entry;
        throw Error("sandbox: workspace " + limits.workspace.string() + " is not empty");
    }
    for (const auto& staged : limits.stage_files) {
        if (!fs::exists(staged)) throw Error("sandbox: staged file missing: " + staged.string());
        fs::copy_file(staged, limits.workspace / staged.filename());
    }

    const fs::path code_file = limits.workspace / limits.code_filename;
    {
        std::ofstream out(code_file);
        if (!out) throw Error("sandbox: cannot write " + code_file.string());
        out << code;
    }

    auto argv_strings = build_argv(limits);
    auto env_strings = build_env(limits);
    std::vector<char*> argv;
    for (auto& s : argv_strings) argv.push_back(s.data());
    argv.push_back(nullptr);
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    int out_pipe[2], err_pipe[2], exec_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe(exec_pipe) != 0)
        throw Error("sandbox: pipe() failed");
    fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

    auto t0 = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) throw Error("sandbox: fork() failed");

    if (pid == 0) {
        setpgid(0, 0);
        close(out_pipe[0]);
        close(err_pipe[0]);
        close(exec_pipe[0]);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[1]);
        close(err_pipe[1]);
        if (chdir(limits.workspace.c_str()) != 0) _exit(126);
        execvpe(argv[0], argv.data(), envp.data());
        int err = errno;  // report exec failure to the parent over the cloexec pipe
        ssize_t ignored = write(exec_pipe[1], &err, sizeof(err));
        (void)ignored;
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);
    close(exec_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    ExecutionResult result;
    CaptureBuffer out_buf{.text = {}, .cap = limits.max_output_bytes};
    CaptureBuffer err_buf{.text = {}, .cap = limits.max_output_bytes};

    bool timed_out = false;
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    bool open_fd[2] = {true, true};
    char chunk[8192];

    while (open_fd[0] || open_fd[1]) {
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double remain = limits.wall_timeout_s - elapsed;
        if (remain <= 0) {
            timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
        fds[0].events = fds[1].events = POLLIN;
        int rc = poll(fds, 2, std::max(1, static_cast<int>(remain * 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) continue;  // timeout re-checked at loop head
        for (int i = 0; i < 2; ++i) {
            if (!open_fd[i]) continue;
            if (fds[i].revents & (POLLIN | POLLHUP)) {
                ssize_t n = read(fds[i].fd, chunk, sizeof(chunk));
                if (n > 0) {
                    (i == 0 ? out_buf : err_buf).feed(chunk, static_cast<std::size_t>(n));
                } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
                    close(fds[i].fd);
                    open_fd[i] = false;
                    fds[i].fd = -1;
                }
            } else if (fds[i].revents & (POLLERR | POLLNVAL)) {
                close(fds[i].fd);
                open_fd[i] = false;
                fds[i].fd = -1;
            }
        }
    }
    if (timed_out) {
        // drain whatever is left so the child can be reaped
        for (int i = 0; i < 2; ++i) {
            if (!open_fd[i]) continue;
            ssize_t n;
            while ((n = read(fds[i].fd, chunk, sizeof(chunk))) > 0)
                (i == 0 ? out_buf : err_buf).feed(chunk, static_cast<std::size_t>(n));
            close(fds[i].fd);
        }
    }

    int wstatus = 0;
    waitpid(pid, &wstatus, 0);
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    int exec_errno = 0;
    ssize_t got = read(exec_pipe[0], &exec_errno, sizeof(exec_errno));
    close(exec_pipe[0]);

    out_buf.finish();
    err_buf.finish();
    result.stdout_text = std::move(out_buf.text);
    result.stderr_text = std::move(err_buf.text);

    // Interpreters print absolutized script paths (tracebacks); rewrite the
    // workspace prefix to "." so captured output is replay-stable.
    auto scrub = [&](std::string& text) {
        for (const std::string& prefix :
             {limits.workspace.string(), fs::weakly_canonical(limits.workspace).string()}) {
            if (prefix.empty() || prefix == ".") continue;
            std::size_t pos = 0;
            while ((pos = text.find(prefix, pos)) != std::string::npos) {
                text.replace(pos, prefix.size(), ".");
                pos += 1;
            }
        }
    };
    scrub(result.stdout_text);
    scrub(result.stderr_text);

    if (got == sizeof(exec_errno)) {
        result.status = ExecStatus::spawn_failure;
        result.exit_code = 127;
        result.stderr_text += "cannot execute interpreter: ";
        result.stderr_text += std::strerror(exec_errno);
        result.stderr_text += '\n';
    } else if (timed_out) {
        result.status = ExecStatus::timeout;
        result.exit_code = -1;
    } else if (WIFEXITED(wstatus)) {
        result.exit_code = WEXITSTATUS(wstatus);
        result.status = result.exit_code == 0 ? ExecStatus::ok : ExecStatus::nonzero_exit;
    } else if (WIFSIGNALED(wstatus)) {
        result.exit_code = 128 + WTERMSIG(wstatus);
        result.status = ExecStatus::nonzero_exit;
    }

    for (const auto& entry : fs::directory_iterator(limits.workspace)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() > 13 && name.rfind("solution_", 0) == 0 &&
            name.compare(name.size() - 4, 4, ".csv") == 0) {
            result.artifacts[name.substr(9, name.size() - 13)] = entry.path();
        }
    }
    return result;
}

ParsedArtifacts parse_artifacts(const ExecutionResult& result) {
    ParsedArtifacts parsed;
    for (const auto& [name, path] : result.artifacts) {
        try {
            csv::Artifact a = csv::read_artifact(path);
            parsed.values[name] = std::move(a.value);
        } catch (const Error&) {
            parsed.unparsable.insert(name);
        }
    }
    return parsed;
}

metrics::ExecutionClass classify_execution(const ExecutionResult& result,
                                           const ParsedArtifacts& parsed,
                                           const std::vector<std::string>& required) {
    if (result.status != ExecStatus::ok) return metrics::ExecutionClass::bug;
    for (const auto& name : required) {
        if (parsed.unparsable.count(name)) return metrics::ExecutionClass::bug;
        auto it = parsed.values.find(name);
        if (it == parsed.values.end() || it->second.empty()) return metrics::ExecutionClass::bug;
    }
    for (const auto& name : required) {
        for (double v : parsed.values.at(name)) {
            if (std::isnan(v) || std::isinf(v)) return metrics::ExecutionClass::nan_result;
        }
    }
    return metrics::ExecutionClass::success;
}

}  // namespace sciagent::sandbox
