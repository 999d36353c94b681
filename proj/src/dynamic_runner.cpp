#include "cgems/dynamic_runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace cgems::runner {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::size_t count_occurrences(const std::string& s, std::string_view what) {
    std::size_t n = 0;
    for (std::size_t pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + what.size()))
        ++n;
    return n;
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "cgems-run-XXXXXX").string();
        if (!::mkdtemp(tmpl.data()))
            throw RunnerError(std::string("cannot create temp directory: ") + std::strerror(errno));
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }
    void reset(int fd = -1) {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_;
};

std::vector<std::string> substitute(const std::vector<std::string>& tmpl, const fs::path& unit) {
    std::vector<std::string> out;
    out.reserve(tmpl.size());
    for (const auto& arg : tmpl)
        out.push_back(replace_all(arg, kSourcePlaceholder, fs::absolute(unit).string()));
    return out;
}

ProcessResult run_mode(Mode mode, const fs::path& unit, const RunnerConfig& cfg) {
    if (!fs::exists(unit))
        throw RunnerError("source file not found: " + unit.string());
    return run_process(substitute(cfg.command(mode), unit), cfg);
}

}  // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::check: return "check";
    case Mode::run: return "run";
    case Mode::coverage: return "coverage";
    }
    return "?";
}

const std::vector<std::string>& RunnerConfig::command(Mode mode) const {
    switch (mode) {
    case Mode::check: return check;
    case Mode::run: return run;
    case Mode::coverage: return coverage;
    }
    return check;
}

void RunnerConfig::validate() const {
    if (timeout.count() <= 0)
        throw RunnerError("runner timeout must be positive");
    for (Mode m : {Mode::check, Mode::run, Mode::coverage}) {
        const auto& cmd = command(m);
        if (cmd.empty())
            throw RunnerError(std::string("empty command template for mode ") + std::string(to_string(m)));
        std::size_t n = 0;
        for (const auto& arg : cmd)
            n += count_occurrences(arg, kSourcePlaceholder);
        if (n != 1)
            throw RunnerError(std::string("command template for mode ") + std::string(to_string(m)) +
                              " must contain exactly one " + std::string(kSourcePlaceholder));
    }
}

RunnerConfig python_runner_config(const fs::path& runner_dir) {
    RunnerConfig cfg;
    const std::string script = (runner_dir / "python_runner.py").string();
    cfg.check = {"python3", script, "check", std::string(kSourcePlaceholder)};
    cfg.run = {"python3", script, "run", std::string(kSourcePlaceholder)};
    cfg.coverage = {"python3", script, "coverage", std::string(kSourcePlaceholder)};
    return cfg;
}

RunnerConfig load_runner_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw RunnerError("cannot open runner config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw RunnerError(std::string("invalid runner config JSON: ") + e.what());
    }
    const std::string dir = fs::absolute(path).parent_path().string();
    auto argv = [&](const char* key) {
        std::vector<std::string> out;
        for (const auto& a : j.at(key))
            out.push_back(replace_all(a.get<std::string>(), kConfigDirPlaceholder, dir));
        return out;
    };
    RunnerConfig cfg;
    try {
        cfg.check = argv("check");
        cfg.run = argv("run");
        cfg.coverage = argv("coverage");
        if (j.contains("working_directory"))
            cfg.working_directory = j.at("working_directory").get<std::string>();
        cfg.timeout = std::chrono::milliseconds(j.value("timeout_ms", 10000));
        cfg.max_output_bytes = j.value("max_output_bytes", std::size_t{1} << 20);
        if (j.contains("env_allowlist"))
            cfg.env_allowlist = j.at("env_allowlist").get<std::vector<std::string>>();
        if (j.contains("stdin_file") && !j.at("stdin_file").get<std::string>().empty())
            cfg.stdin_file = fs::path(dir) / j.at("stdin_file").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw RunnerError(std::string("malformed runner config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ProcessResult run_process(const std::vector<std::string>& argv, const RunnerConfig& cfg) {
    if (argv.empty())
        throw RunnerError("empty command");

    std::optional<TempDir> temp;
    fs::path cwd = cfg.working_directory;
    if (cwd.empty()) {
        temp.emplace();
        cwd = temp->path();
    }

    std::vector<std::string> env_strings;
    for (const auto& name : cfg.env_allowlist)
        if (const char* v = std::getenv(name.c_str()))
            env_strings.push_back(name + "=" + v);
    std::vector<char*> envp;
    for (auto& e : env_strings)
        envp.push_back(e.data());
    envp.push_back(nullptr);
    std::vector<std::string> args = argv;
    std::vector<char*> cargv;
    for (auto& a : args)
        cargv.push_back(a.data());
    cargv.push_back(nullptr);

    int out_pipe[2], err_pipe[2], exec_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) || ::pipe2(err_pipe, O_CLOEXEC) || ::pipe2(exec_pipe, O_CLOEXEC))
        throw RunnerError(std::string("pipe: ") + std::strerror(errno));
    Fd out_r(out_pipe[0]), out_w(out_pipe[1]), err_r(err_pipe[0]), err_w(err_pipe[1]);
    Fd exec_r(exec_pipe[0]), exec_w(exec_pipe[1]);

    const std::string stdin_path = cfg.stdin_file.empty() ? "/dev/null" : cfg.stdin_file.string();
    const std::string cwd_str = cwd.string();

    auto start = Clock::now();
    pid_t pid = ::fork();
    if (pid < 0)
        throw RunnerError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        int in = ::open(stdin_path.c_str(), O_RDONLY);
        if (in < 0 || ::dup2(in, 0) < 0 || ::dup2(out_pipe[1], 1) < 0 || ::dup2(err_pipe[1], 2) < 0 ||
            ::chdir(cwd_str.c_str()) != 0) {
            int e = errno;
            [[maybe_unused]] auto w = ::write(exec_pipe[1], &e, sizeof e);
            ::_exit(127);
        }
        ::execvpe(cargv[0], cargv.data(), envp.data());
        int e = errno;
        [[maybe_unused]] auto w = ::write(exec_pipe[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_w.reset();
    err_w.reset();
    exec_w.reset();

    int exec_errno = 0;
    if (::read(exec_r.get(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        int status;
        ::waitpid(pid, &status, 0);
        throw RunnerError("cannot start '" + argv[0] + "': " + std::strerror(exec_errno));
    }

    ProcessResult res;
    const auto deadline = start + cfg.timeout;
    std::array<char, 8192> buf{};
    std::array<pollfd, 2> fds{pollfd{out_r.get(), POLLIN, 0}, pollfd{err_r.get(), POLLIN, 0}};
    std::array<std::string*, 2> sinks{&res.stdout_text, &res.stderr_text};
    int open_fds = 2;
    while (open_fds > 0) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            res.timed_out = true;
            break;
        }
        int rc = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(left, 100)));
        if (rc < 0 && errno != EINTR)
            break;
        for (std::size_t k = 0; k < fds.size(); ++k) {
            if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            ssize_t n = ::read(fds[k].fd, buf.data(), buf.size());
            if (n <= 0) {
                fds[k].fd = -1;
                --open_fds;
                continue;
            }
            std::string& sink = *sinks[k];
            std::size_t room = cfg.max_output_bytes > sink.size() ? cfg.max_output_bytes - sink.size() : 0;
            sink.append(buf.data(), std::min<std::size_t>(room, static_cast<std::size_t>(n)));
            if (k == 0 && static_cast<std::size_t>(n) > room)
                res.stdout_truncated = true;
        }
    }

    int status = 0;
    if (res.timed_out)
        ::kill(-pid, SIGKILL);
    for (;;) {
        pid_t w = ::waitpid(pid, &status, WNOHANG);
        if (w == pid || (w < 0 && errno != EINTR))
            break;
        if (!res.timed_out && Clock::now() >= deadline) {
            res.timed_out = true;
            ::kill(-pid, SIGKILL);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    ::kill(-pid, SIGKILL);  // stragglers left in the group

    res.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    return res;
}

CompileStatus check_compiles(const fs::path& unit, const RunnerConfig& cfg) {
    ProcessResult r = run_mode(Mode::check, unit, cfg);
    if (r.timed_out)
        throw RunnerError("check mode timed out for " + unit.string());
    CompileStatus s;
    s.diagnostics = r.stderr_text;
    if (r.exit_code == 0) {
        s.compiling = 1;
        return s;
    }
    std::istringstream lines(r.stderr_text);
    std::string line;
    while (std::getline(lines, line))
        if (line.find_first_not_of(" \t") != std::string::npos)
            ++s.error_count;
    s.error_count = std::max(1, s.error_count);
    return s;
}

std::int64_t measure_execution(const fs::path& unit, const RunnerConfig& cfg) {
    std::array<std::int64_t, 3> times{};
    for (auto& t : times) {
        ProcessResult r = run_mode(Mode::run, unit, cfg);
        if (r.timed_out)
            throw TimeoutError("execution exceeded " + std::to_string(cfg.timeout.count()) + " ms");
        if (r.exit_code != 0)
            throw ExecutionError("program exited with status " + std::to_string(r.exit_code), r.stderr_text);
        t = r.wall_time_us;
    }
    std::sort(times.begin(), times.end());
    return times[1];
}

RunOutcome parse_coverage_output(const std::string& stdout_text) {
    std::istringstream lines(stdout_text);
    std::string line, last_json;
    while (std::getline(lines, line)) {
        auto p = line.find_first_not_of(" \t\r");
        if (p != std::string::npos && line[p] == '{')
            last_json = line;
    }
    if (last_json.empty())
        throw RunnerError("coverage mode printed no JSON object");
    RunOutcome o;
    o.mode = Mode::coverage;
    try {
        auto j = nlohmann::json::parse(last_json);
        for (int l : j.at("executed_lines").get<std::vector<int>>())
            o.executed_lines.insert(l);
        for (int l : j.at("executable_lines").get<std::vector<int>>())
            o.executable_lines.insert(l);
    } catch (const nlohmann::json::exception& e) {
        throw RunnerError(std::string("malformed coverage JSON: ") + e.what());
    }
    o.ok = true;
    return o;
}

double coverage_percent(const RunOutcome& o) {
    if (o.executable_lines.empty())
        return 100.0;
    std::size_t hit = 0;
    for (int l : o.executed_lines)
        hit += o.executable_lines.contains(l);
    return std::clamp(100.0 * static_cast<double>(hit) / static_cast<double>(o.executable_lines.size()), 0.0, 100.0);
}

double measure_coverage(const fs::path& unit, const RunnerConfig& cfg) {
    ProcessResult r = run_mode(Mode::coverage, unit, cfg);
    if (r.timed_out)
        throw TimeoutError("coverage run exceeded " + std::to_string(cfg.timeout.count()) + " ms");
    if (r.exit_code != 0)
        throw ExecutionError("coverage run exited with status " + std::to_string(r.exit_code), r.stderr_text);
    return coverage_percent(parse_coverage_output(r.stdout_text));
}

}  // namespace cgems::runner
